import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ccnorm import (DegenerateParameters, NaturalParams, OracleConfig,
                    OverflowInSummand, cancellation_diagnostics,
                    log_norm_const_signed, norm_const_closed,
                    norm_const_oracle, region_of, summands)
from ccnorm._sigfig import agree_sig

K5 = NaturalParams((1.0, 2.0, 3.0, 4.0))
K10 = NaturalParams(tuple(float(i) for i in range(1, 10)))
C5 = 0.3632171508392203  # converged oracle value for K5

# the published single-precision summands for K5
K5_SUMMANDS_32 = (-0.45304695, 1.847264, -3.3475895, 2.2749228, 0.04166667)


def _full_eval(full):
    """closed64 over an explicit full K-vector via zero-last normalization."""
    a = full[-1]
    nat = NaturalParams(tuple(v - a for v in full[:-1]))
    return math.exp(a) * norm_const_closed(nat, "binary64").value


def test_k5_binary32_value_and_summands():
    res = norm_const_closed(K5, "binary32")
    assert res.value == pytest.approx(0.363217, rel=1e-4)
    assert res.precision == "binary32"
    terms = summands(K5, "binary32")
    assert terms.dtype == np.float32  # every intermediate stays binary32
    for got, want in zip(terms, K5_SUMMANDS_32):
        # the published decimals are 7-digit prints of the binary32 terms,
        # so round-tripping can sit an ulp off; compare at the digit level
        assert float(got) == pytest.approx(want, rel=1e-7)


def test_k10_binary32():
    res = norm_const_closed(K10, "binary32")
    assert res.value == pytest.approx(3.5982e-4, rel=5e-4)


def test_k2_log2():
    res = norm_const_closed(NaturalParams((math.log(2),)), "binary64")
    assert res.value == pytest.approx(1 / math.log(2), rel=1e-12)
    assert res.value == pytest.approx(1.4426950, rel=1e-7)


def test_exact_tie_routed_to_repeated():
    with pytest.raises(DegenerateParameters, match="repeated"):
        norm_const_closed(NaturalParams((1.0, 1.0)), "binary64")
    with pytest.raises(DegenerateParameters):
        # ties the implicit zero
        norm_const_closed(NaturalParams((0.0, 3.0)), "binary64")


def test_binary32_overflow_names_log_route():
    with pytest.raises(OverflowInSummand, match="log_norm_const_signed"):
        norm_const_closed(NaturalParams((100.0,)), "binary32")


def test_logsumexp_k5():
    log_abs, sign = log_norm_const_signed(K5)
    assert sign == 1
    assert log_abs == pytest.approx(math.log(C5), rel=1e-10)


def test_logsumexp_no_overflow_at_800():
    log_abs, sign = log_norm_const_signed(NaturalParams((800.0,)))
    assert sign == 1
    assert log_abs == pytest.approx(800.0 - math.log(800.0), abs=1e-9)


def test_logsumexp_negative_k2():
    log_abs, sign = log_norm_const_signed(NaturalParams((-3.0,)))
    assert sign == 1
    assert log_abs == pytest.approx(math.log((1 - math.exp(-3)) / 3), rel=1e-12)


def test_logsumexp_matches_closed64_when_stable():
    rng = np.random.default_rng(5)
    for _ in range(20):
        k = int(rng.integers(2, 8))
        gaps = 0.3 + rng.random(k - 1) * 2
        nat = NaturalParams(tuple(np.cumsum(gaps) - 1.0))
        res = norm_const_closed(nat, "binary64")
        if res.diagnostics.digits_lost_estimate >= 2:
            continue
        log_abs, sign = log_norm_const_signed(nat)
        assert sign * math.exp(log_abs) == pytest.approx(res.value, rel=1e-12)


def test_permutation_invariance():
    base = _full_eval((1.0, 2.0, 3.0, 4.0, 0.0))
    rng = np.random.default_rng(11)
    for _ in range(6):
        perm = tuple(np.array((1.0, 2.0, 3.0, 4.0, 0.0))[rng.permutation(5)])
        assert _full_eval(perm) == pytest.approx(base, rel=1e-10)


@settings(max_examples=30)
@given(st.floats(min_value=-5.0, max_value=5.0))
def test_shift_covariance(a):
    base = _full_eval((1.0, 2.0, 3.0, 4.0, 0.0))
    shifted = _full_eval(tuple(v + a for v in (1.0, 2.0, 3.0, 4.0, 0.0)))
    assert shifted == pytest.approx(math.exp(a) * base, rel=1e-10)


def test_oracle_agreement_gap_ge_1():
    # 3 sig figs whenever the pairwise gap is at least 1 and K <= 10
    rng = np.random.default_rng(3)
    for _ in range(10):
        k = int(rng.integers(2, 11))
        gaps = 1.0 + rng.random(k - 1)
        nat = NaturalParams(tuple(np.cumsum(gaps)))
        c64 = norm_const_closed(nat, "binary64").value
        ref = norm_const_oracle(nat, OracleConfig(target_sig_figs=5)).value
        assert agree_sig(c64, ref, 3)


def test_diagnostics_k10():
    rep = cancellation_diagnostics(K10)
    assert rep.log10_max_abs_summand == pytest.approx(-0.963, abs=0.01)
    assert rep.log10_abs_result == pytest.approx(-3.44, abs=0.01)
    assert 2.0 <= rep.digits_lost_estimate <= 3.0
    assert rep.region == "green"


def test_diagnostics_well_separated():
    rep = cancellation_diagnostics(NaturalParams((-100.0,)))
    assert rep.digits_lost_estimate == pytest.approx(0.0, abs=0.05)
    assert rep.region == "green"


def test_diagnostics_k25_beyond_binary32():
    nat = NaturalParams(tuple(float(i) for i in range(1, 25)))
    rep = cancellation_diagnostics(nat)
    # past the 24-bit decimal budget: binary32 has no correct digits left
    assert rep.digits_lost_estimate > 24 * math.log10(2)
    v32 = norm_const_closed(nat, "binary32").value
    ref = norm_const_oracle(nat, OracleConfig(target_sig_figs=6)).value
    assert not agree_sig(v32, ref, 1)


def test_diagnostics_rescued_from_corrupted_binary64():
    # at K=52 the binary64 residue overstates |C| by ~2.7 orders; the raw
    # self-estimate would read ~13.5 and misclassify the region
    rep = cancellation_diagnostics(NaturalParams(tuple(map(float, range(1, 52)))))
    assert rep.digits_lost_estimate == pytest.approx(16.19, abs=0.3)
    assert rep.region == "red"


@pytest.mark.parametrize("gap,region", [
    (5.0, "green"), (8.0, "green"), (10.0, "yellow"), (16.0, "yellow"),
    (20.0, "red"),
])
def test_region_thresholds(gap, region):
    assert region_of(gap) == region


def test_closed_result_carries_self_report():
    res = norm_const_closed(K10, "binary64")
    assert res.diagnostics is not None
    assert res.diagnostics.digits_lost_estimate == pytest.approx(2.48, abs=0.1)
