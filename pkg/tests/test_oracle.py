import math

import numpy as np
import pytest

from ccnorm import (DegenerateParameters, NaturalParams, OracleConfig,
                    PrecisionExhausted, UnsupportedDimension,
                    norm_const_closed, norm_const_oracle,
                    norm_const_quadrature)
from ccnorm._sigfig import agree_sig, digits_agreeing

K5 = NaturalParams((1.0, 2.0, 3.0, 4.0))


def test_k5_converged():
    res = norm_const_oracle(K5, OracleConfig(target_sig_figs=13))
    assert res.value == pytest.approx(0.3632171508392203, rel=1e-13)
    assert res.sign == 1
    assert res.method == "oracle"
    assert res.precision_bits >= 53


def test_k40_binary64_has_no_usable_digits():
    nat = NaturalParams(tuple(float(i) for i in range(1, 40)))
    v64 = norm_const_closed(nat, "binary64").value
    ref = norm_const_oracle(nat, OracleConfig(target_sig_figs=6)).value
    assert not agree_sig(v64, ref, 3)


def test_k50_binary64_agrees_in_zero_digits():
    nat = NaturalParams(tuple(float(i) for i in range(1, 50)))
    v64 = norm_const_closed(nat, "binary64").value
    ref = norm_const_oracle(nat, OracleConfig(target_sig_figs=6)).value
    assert digits_agreeing(v64, ref) == 0.0


def test_tie_rejected():
    with pytest.raises(DegenerateParameters):
        norm_const_oracle(NaturalParams((2.0, 2.0)))


def test_precision_exhausted_reports_last_pair():
    cfg = OracleConfig(target_sig_figs=30, initial_bits=64, max_bits=128)
    with pytest.raises(PrecisionExhausted) as exc:
        norm_const_oracle(NaturalParams(tuple(map(float, range(1, 30)))), cfg)
    assert exc.value.last_two is not None
    assert len(exc.value.last_two) == 2


def test_convergence_is_stable_under_more_bits():
    cfg = OracleConfig(target_sig_figs=10)
    res = norm_const_oracle(K5, cfg)
    wide = norm_const_oracle(K5, OracleConfig(target_sig_figs=10,
                                              initial_bits=4 * res.precision_bits))
    assert agree_sig(res.value, wide.value, 10)


def test_quadrature_k4():
    assert norm_const_quadrature(K5) == pytest.approx(0.363217, rel=1e-5)


def test_quadrature_uniform_corners():
    assert norm_const_quadrature(NaturalParams((0.0,))) == pytest.approx(1.0, rel=1e-9)
    assert norm_const_quadrature(NaturalParams((0.0, 0.0))) == pytest.approx(0.5, rel=1e-9)


def test_quadrature_dimension_cap():
    with pytest.raises(UnsupportedDimension):
        norm_const_quadrature(NaturalParams(tuple(map(float, range(1, 7)))))


def test_oracle_matches_quadrature_small_random():
    rng = np.random.default_rng(17)
    for _ in range(6):
        k = int(rng.integers(2, 6))
        nat = NaturalParams(tuple(rng.standard_normal(k - 1) * 2))
        ref = norm_const_oracle(nat, OracleConfig(target_sig_figs=8)).value
        quad = norm_const_quadrature(nat, rel_tol=1e-9)
        assert agree_sig(ref, quad, 5)


def test_magnitude_tracks_factorial_decay():
    # C stays within a few orders of 1/(K-1)! for O(1) parameters
    rng = np.random.default_rng(23)
    k = 10
    nat = NaturalParams(tuple(rng.standard_normal(k - 1)))
    res = norm_const_oracle(nat, OracleConfig(target_sig_figs=6))
    assert abs(res.log_abs / math.log(10) + math.lgamma(k) / math.log(10)) <= 3.0
