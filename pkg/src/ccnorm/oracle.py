"""Ground-truth C(eta): adaptive arbitrary precision, checked by quadrature.

The oracle evaluates the closed-form sum in arbitrary-precision binary
floating point, doubling the working precision until two successive
evaluations agree to the requested number of significant figures. The
quadrature routine integrates the iterated simplex integral directly and
shares no code with the closed-form sum; it exists to catch transcription
errors in the sum itself.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Sequence

import mpmath
from mpmath.ctx_mp import MPContext
from scipy import integrate

from ._sigfig import agree_sig
from .errors import (DegenerateParameters, PrecisionExhausted,
                     UnsupportedDimension)
from .params import EvalResult, NaturalParams


@dataclass(frozen=True)
class OracleConfig:
    target_sig_figs: int = 4
    initial_bits: int = 64
    max_bits: int = 65536
    growth: int = 2

    def __post_init__(self) -> None:
        if self.target_sig_figs < 1:
            raise ValueError("target_sig_figs must be >= 1")
        if self.initial_bits < 53:
            raise ValueError("initial_bits must be >= 53")
        if self.max_bits < self.initial_bits:
            raise ValueError("max_bits must be >= initial_bits")
        if self.growth < 2:
            raise ValueError("growth must be >= 2")


def closed_sum_mp(full: Sequence[Any], ctx: MPContext) -> Any:
    """The closed-form sum over a full K-vector, in ctx's precision.

    Accepts floats or mpf values; mpf inputs are preserved exactly as long
    as ctx.prec covers them. No log-space tricks are needed: the exponent
    range of arbitrary-precision floats is effectively unbounded.
    """
    w = [ctx.mpf(v) for v in full]
    total = ctx.mpf(0)
    for k, wk in enumerate(w):
        den = ctx.mpf(1)
        for i, wi in enumerate(w):
            if i != k:
                den *= wk - wi
        total += ctx.exp(wk) / den
    return total


def converge_mp(full: Sequence[Any], cfg: OracleConfig = OracleConfig()) -> tuple[Any, int]:
    """Adaptive-precision closed-form sum; returns (value, bits used).

    A fresh context per call: nothing global is mutated, concurrent calls
    cannot interfere. Raises PrecisionExhausted past cfg.max_bits.
    """
    vals = list(full)
    if len(set(float(v) for v in vals)) != len(vals):
        raise DegenerateParameters(
            "tied natural parameters; use the repeated-value backend")
    ctx = MPContext()
    ctx.prec = cfg.initial_bits
    prev = closed_sum_mp(vals, ctx)
    bits = cfg.initial_bits
    while bits * cfg.growth <= cfg.max_bits:
        bits *= cfg.growth
        ctx.prec = bits
        cur = closed_sum_mp(vals, ctx)
        if agree_sig(prev, cur, cfg.target_sig_figs):
            return cur, bits
        prev = cur
    raise PrecisionExhausted(
        f"no {cfg.target_sig_figs}-figure agreement up to {cfg.max_bits} bits",
        last_two=(float(prev), float(cur) if bits > cfg.initial_bits else float(prev)))


def norm_const_oracle(nat: NaturalParams, cfg: OracleConfig = OracleConfig()) -> EvalResult:
    """C(eta) to cfg.target_sig_figs significant figures, or an error."""
    value, bits = converge_mp(nat.full(), cfg)
    with mpmath.workprec(max(bits, 64)):
        log_abs = float(mpmath.log(abs(mpmath.mpf(value))))
    # float() maps out-of-range magnitudes to inf/0; log_abs keeps the info
    return EvalResult(value=float(value), log_abs=log_abs,
                      sign=1 if value > 0 else -1,
                      method="oracle", precision=f"arbitrary({bits})")


def _exp_integral(a: float, w: float) -> float:
    """int_0^w e^{a x} dx, stable near a = 0."""
    if a == 0.0:
        return w
    return math.expm1(a * w) / a


def norm_const_quadrature(nat: NaturalParams, rel_tol: float = 1e-7) -> float:
    """C(eta) by nested 1-D adaptive quadrature of the iterated integral.

    Independent of the closed-form sum. Three exact transformations keep
    the nesting cheap at wide parameter spreads: all exponents are shifted
    non-positive (C(eta + a) = e^a C(eta)); the least negative exponent is
    assigned to the implicit coordinate x_K = 1 - sum; the steepest
    exponent goes innermost, where (for K >= 3) that last level is the
    exact one-exponential antiderivative - the same reduction the iterated
    form itself performs. K = 2 is integrated fully numerically so even
    the smallest case exercises real quadrature.
    """
    if nat.dim > 5:
        raise UnsupportedDimension(
            f"nested quadrature supports K <= 5, got K = {nat.dim}")
    full = sorted(nat.full(), reverse=True)
    shift = full[0]
    ez = sorted(v - shift for v in full)  # ascending, all <= 0
    spectator = ez.pop()  # least negative rides on x_K
    coef = sorted((c - spectator for c in ez), reverse=True)
    log_pref = shift + spectator
    n = len(coef)
    if n == 1:
        val, _ = integrate.quad(lambda x: math.exp(coef[0] * x), 0.0, 1.0,
                                epsabs=0.0, epsrel=rel_tol, limit=200)
        return math.exp(log_pref) * val

    def level(i: int, rem: float, tol: float) -> float:
        if i == n - 1:
            return _exp_integral(coef[i], rem)
        val, _ = integrate.quad(
            lambda x: math.exp(coef[i] * x) * level(i + 1, rem - x, tol * 0.2),
            0.0, rem, epsabs=0.0, epsrel=tol, limit=200)
        return val

    return math.exp(log_pref) * level(0, 1.0, rel_tol)
