import cmath
import math

import mpmath
import pytest

from ccnorm import (InversionDiverged, InversionSettings, LaplaceImage,
                    NaturalParams, OracleConfig, PoleHit, image_eval,
                    image_for, invert, norm_const_oracle, scaled_c)
from ccnorm._sigfig import agree_sig

K5 = NaturalParams((1.0, 2.0, 3.0, 4.0))
E_MINUS_1 = math.e - 1.0


def test_image_eval_two_factor():
    img = LaplaceImage(poles=(1.0, 0.0), shift=0.0)
    assert image_eval(img, 2.0) == pytest.approx(0.5)


def test_image_eval_tolerates_repeated_poles():
    img = LaplaceImage(poles=(1.0, 1.0, 0.0), shift=0.0)
    assert image_eval(img, 2.0) == pytest.approx(0.5)


def test_image_eval_pole_hit():
    img = LaplaceImage(poles=(1.0, 0.0), shift=0.0)
    with pytest.raises(PoleHit):
        image_eval(img, 1.0)


def test_image_eval_matches_naive_product_on_contour():
    img = image_for(K5)
    interesting = [complex(1.1, 40.0), complex(1.1, 0.5), complex(3.0, -7.0)]
    with mpmath.workprec(200):
        for s in interesting:
            got = image_eval(img, s)
            sm = mpmath.mpc(s.real, s.imag)
            naive = 1 / mpmath.fprod(sm - p for p in img.shifted_poles)
            rel = abs(got - complex(naive)) / abs(complex(naive))
            assert rel < 1e-14


def test_invert_dehoog_k5():
    res = invert(image_for(K5), 1.0, InversionSettings(method="dehoog"))
    assert agree_sig(res.value, 0.3632171508392203, 4)
    assert res.method == "dehoog"


def test_invert_dehoog_k10():
    nat = NaturalParams(tuple(float(i) for i in range(1, 10)))
    res = invert(image_for(nat), 1.0, InversionSettings(method="dehoog"))
    assert agree_sig(res.value, 3.5983050474897027e-4, 3)


@pytest.mark.parametrize("method,rel", [
    ("dehoog", 1e-6), ("talbot", 1e-9),
    # the sequence-acceleration error at the default N=14 dominates here
    ("stehfest", 1e-4),
])
def test_invert_k2_all_methods(method, rel):
    # the continuous Bernoulli image is tame enough for all three
    res = invert(image_for(NaturalParams((1.0,))), 1.0,
                 InversionSettings(method=method))
    assert res.value == pytest.approx(E_MINUS_1, rel=rel)


def test_invert_k2_stehfest_converged():
    res = invert(image_for(NaturalParams((1.0,))), 1.0,
                 InversionSettings(method="stehfest", stehfest_N=24))
    assert res.value == pytest.approx(E_MINUS_1, rel=1e-8)


@pytest.mark.parametrize("eta1", [-2.0, 1.0, 5.0])
@pytest.mark.parametrize("t", [0.5, 1.0, 2.0])
def test_transform_pair_k2(eta1, t):
    analytic = (math.exp(eta1 * t) - 1.0) / eta1
    res = invert(image_for(NaturalParams((eta1,))), t,
                 InversionSettings(method="dehoog"))
    assert agree_sig(res.value, analytic, 6)


@pytest.mark.parametrize("method,settings", [
    ("dehoog", InversionSettings(method="dehoog")),
    ("stehfest", InversionSettings(method="stehfest", stehfest_N=28)),
])
def test_shift_choice_does_not_matter(method, settings):
    default = invert(image_for(K5), 1.0, settings)
    other = invert(image_for(K5, shift=max(K5.full()) + 3.0), 1.0, settings)
    assert agree_sig(default.value, other.value, 6)


def test_stehfest_accuracy_grows_with_n():
    truth = 0.3632171508392203
    img = image_for(K5)
    e14 = abs(invert(img, 1.0, InversionSettings(method="stehfest")).value - truth)
    e24 = abs(invert(img, 1.0, InversionSettings(method="stehfest",
                                                 stehfest_N=24)).value - truth)
    assert e24 < e14 / 100
    assert e24 / truth < 1e-4


def test_dehoog_survives_sigma_001_k15():
    # closed binary64 is unusable here; the contour route still gets 3 figures
    import numpy as np
    rng = np.random.Generator(np.random.Philox(key=7))
    nat = NaturalParams(tuple(rng.standard_normal(14) * 0.01))
    ref = norm_const_oracle(nat, OracleConfig(target_sig_figs=6)).value
    res = invert(image_for(nat), 1.0, InversionSettings(method="dehoog"))
    assert agree_sig(res.value, ref, 3)


@pytest.mark.xfail(strict=False, reason="fixed-contour inversion is documented "
                   "as unreliable on wide pole spreads; this build's contour "
                   "radius happens to converge, so the divergence may not occur")
def test_talbot_diverges_on_wide_grid():
    nat = NaturalParams(tuple(float(i) for i in range(1, 10)))
    with pytest.raises(InversionDiverged):
        invert(image_for(nat), 1.0, InversionSettings(method="talbot"))


def test_scaled_c_k2_symbolic():
    assert scaled_c(NaturalParams((1.0,)), 2.0) == pytest.approx(6.389056, rel=1e-6)
    assert scaled_c(NaturalParams((1.0,)), 2.0) == pytest.approx(math.exp(2) - 1, rel=1e-10)


def test_scaled_c_reduces_to_norm_const_at_t1():
    assert agree_sig(scaled_c(K5, 1.0), 0.363217, 6)


def test_scaled_c_flat_measure():
    # eta = 0 makes c(t) the measure of the scaled simplex segment
    assert scaled_c(NaturalParams((0.0,)), 3.0) == pytest.approx(3.0, rel=1e-12)


def test_scaled_c_matches_inversion():
    for t in (0.5, 2.0):
        direct = scaled_c(K5, t)
        via_invert = invert(image_for(K5), t, InversionSettings(method="dehoog"))
        assert agree_sig(direct, via_invert.value, 4)


def test_invert_requires_positive_t():
    with pytest.raises(ValueError):
        invert(image_for(K5), 0.0, InversionSettings(method="dehoog"))


def test_invert_rejects_underspecified_shift():
    img = LaplaceImage(poles=(1.0, 0.0), shift=0.0)  # constructible, max pole 1
    with pytest.raises(ValueError, match="shifted pole"):
        invert(img, 1.0, InversionSettings(method="dehoog"))


def test_settings_validation():
    with pytest.raises(ValueError):
        InversionSettings(method="stehfest", stehfest_N=15)  # odd
    with pytest.raises(ValueError):
        InversionSettings(method="dehoog", dehoog_M=1)
    with pytest.raises(ValueError, match="unknown inversion method"):
        invert(image_for(K5), 1.0, InversionSettings(method="nope"))
