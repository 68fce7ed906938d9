"""C(eta) as a numerical inverse Laplace transform.

The scaled constant c(t) = t^{K-1} C(t*eta) has image
L[c](s) = prod_i 1/(s - eta_i) over the K poles (eta_1..eta_{K-1}, 0);
C(eta) is c(1). The image is evaluated in complex log space, which has no
subtractive cancellation, and inverted by one of three classical
algorithms. All poles are shifted left of the origin first (the shift is
exact: c(t) = e^{a t} c_shifted(t)), so every inversion abscissa is valid.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Literal, Sequence

from mpmath.ctx_mp import MPContext

from .errors import DegenerateParameters, InversionDiverged, PoleHit
from .params import EvalResult, NaturalParams, result_from_log


@dataclass(frozen=True)
class LaplaceImage:
    """Pole-product transform image with its stabilizing shift.

    Construction accepts any shift (image_eval works wherever s is off the
    poles); inversion additionally requires every shifted pole <= -1, which
    invert() checks.
    """

    poles: tuple[float, ...]  # (eta_1, ..., eta_{K-1}, 0), unshifted
    shift: float              # a, subtracted from every pole

    def __post_init__(self) -> None:
        if not all(math.isfinite(p) for p in self.poles) or not self.poles:
            raise ValueError("poles must be nonempty and finite")
        if not math.isfinite(self.shift):
            raise ValueError(f"shift {self.shift!r} must be finite")

    @property
    def shifted_poles(self) -> tuple[float, ...]:
        return tuple(p - self.shift for p in self.poles)


@dataclass(frozen=True)
class InversionSettings:
    method: Literal["dehoog", "stehfest", "talbot"] = "dehoog"
    stehfest_N: int = 14
    stehfest_bits: int = 256
    dehoog_M: int = 20
    dehoog_tol: float = 1e-10
    talbot_M: int = 32

    def __post_init__(self) -> None:
        if self.stehfest_N % 2 != 0:
            raise ValueError("stehfest_N must be even")
        for name in ("stehfest_N", "dehoog_M", "talbot_M"):
            if getattr(self, name) < 2:
                raise ValueError(f"{name} must be >= 2")


def image_for(nat: NaturalParams, shift: float | None = None) -> LaplaceImage:
    """Image of eta's scaled constant; default shift puts max pole at -1."""
    poles = nat.full()
    if shift is None:
        shift = max(poles) + 1.0
    return LaplaceImage(poles=poles, shift=shift)


def image_eval(image: LaplaceImage, s: complex) -> complex:
    """prod 1/(s - p) over shifted poles, via exp(-sum log(s - p)).

    Repeated poles are perfectly legal here; only evaluation exactly at a
    pole is an error.
    """
    acc = 0.0 + 0.0j
    for p in image.shifted_poles:
        d = complex(s) - p
        if d == 0:
            raise PoleHit(f"image evaluated at its pole s = {s!r}")
        acc += cmath.log(d)
    return cmath.exp(-acc)


def _dehoog(F: Callable[[complex], complex], t: float, p_max: float,
            M: int, tol: float) -> float:
    """Fourier-series inversion with quotient-difference acceleration.

    Contour Re(s) = gamma must clear both the poles (via -p_max/t) and the
    series truncation level (via -ln(tol)/(2T)); dropping the tol term
    aliases the series and loses ~3 digits at K = 2 already.
    """
    T = 2.0 * t
    gamma = max(1.0, -p_max / t) - math.log(tol) / (2.0 * T)
    fp = [F(complex(gamma, k * math.pi / T)) for k in range(2 * M + 1)]
    if not all(cmath.isfinite(v) for v in fp):
        raise InversionDiverged("non-finite image sample on the contour")
    try:
        e = [[0.0 + 0.0j] * (M + 1) for _ in range(2 * M + 1)]
        q = [[0.0 + 0.0j] * M for _ in range(2 * M)]
        q[0][0] = fp[1] / (fp[0] / 2.0)
        for i in range(1, 2 * M):
            q[i][0] = fp[i + 1] / fp[i]
        for r in range(1, M + 1):
            for i in range(2 * (M - r) + 1):
                e[i][r] = q[i + 1][r - 1] - q[i][r - 1] + e[i + 1][r - 1]
            if r < M:
                for i in range(2 * (M - r - 1) + 2):
                    q[i][r] = q[i + 1][r - 1] * e[i + 1][r] / e[i][r]
        d = [0.0 + 0.0j] * (2 * M + 1)
        d[0] = fp[0] / 2.0
        for r in range(1, M + 1):
            d[2 * r - 1] = -q[0][r - 1]
            d[2 * r] = -e[0][r]
        z = cmath.exp(1j * math.pi * t / T)
        A = [0.0 + 0.0j] * (2 * M + 2)
        B = [0.0 + 0.0j] * (2 * M + 2)
        A[0], B[0] = 0.0, 1.0
        A[1], B[1] = d[0], 1.0
        for n in range(2, 2 * M + 2):
            dz = d[n - 1] * z
            A[n] = A[n - 1] + dz * A[n - 2]
            B[n] = B[n - 1] + dz * B[n - 2]
        # improved last-term remainder
        brem = (1.0 + (d[2 * M - 1] - d[2 * M]) * z) / 2.0
        rem = brem * (cmath.sqrt(1.0 + d[2 * M] * z / (brem * brem)) - 1.0)
        A[2 * M + 1] = A[2 * M] + rem * A[2 * M - 1]
        B[2 * M + 1] = B[2 * M] + rem * B[2 * M - 1]
        val = A[2 * M + 1] / B[2 * M + 1]
    except ZeroDivisionError as exc:
        raise InversionDiverged("quotient-difference table breakdown") from exc
    out = (math.exp(gamma * t) / T) * val.real
    if not math.isfinite(out):
        raise InversionDiverged("non-finite accelerated sum")
    return out


def stehfest_coefficients(N: int, ctx: MPContext) -> list:
    """Salzer summation weights V_k; they grow combinatorially and cancel,
    which is why the whole method runs in arbitrary precision."""
    V = []
    for k in range(1, N + 1):
        acc = ctx.mpf(0)
        for j in range((k + 1) // 2, min(k, N // 2) + 1):
            num = ctx.mpf(j) ** (N // 2) * ctx.factorial(2 * j)
            den = (ctx.factorial(N // 2 - j) * ctx.factorial(j)
                   * ctx.factorial(j - 1) * ctx.factorial(k - j)
                   * ctx.factorial(2 * j - k))
            acc += num / den
        V.append((-1) ** (k + N // 2) * acc)
    return V


def _stehfest(shifted_poles: Sequence[float], t: float, N: int, bits: int):
    """Gaver-Stehfest sequence at real abscissas k ln2/t; returns an mpf."""
    ctx = MPContext()
    ctx.prec = bits
    V = stehfest_coefficients(N, ctx)
    ln2 = ctx.ln(2)
    tm = ctx.mpf(t)
    acc = ctx.mpf(0)
    for k in range(1, N + 1):
        s = k * ln2 / tm
        logF = ctx.mpf(0)
        for p in shifted_poles:
            logF -= ctx.log(s - p)
        acc += V[k - 1] * ctx.exp(logF)
    return acc * ln2 / tm, ctx


def _talbot(F: Callable[[complex], complex], t: float, M: int) -> float:
    """Fixed-contour Talbot rule with M nodes."""
    r = 2.0 * M / (5.0 * t)
    acc = 0.5 * math.exp(r * t) * F(complex(r, 0.0)).real
    for k in range(1, M):
        th = k * math.pi / M
        cot = 1.0 / math.tan(th)
        s = complex(r * th * cot, r * th)
        gam = cmath.exp(t * s) * (complex(1.0, th * (1.0 + cot * cot))
                                  - complex(0.0, cot))
        term = (gam * F(s)).real
        if not math.isfinite(term):
            raise InversionDiverged(f"non-finite Talbot term at node {k}")
        acc += term
    out = (2.0 / (5.0 * t)) * acc
    if not math.isfinite(out):
        raise InversionDiverged("non-finite Talbot sum")
    return out


def invert(image: LaplaceImage, t: float,
           settings: InversionSettings = InversionSettings()) -> EvalResult:
    """Invert the image at time t; t = 1 recovers C(eta).

    The shifted inversion result f_sh(t) is un-shifted exactly through the
    log magnitude: log|f(t)| = a t + log|f_sh(t)|.
    """
    if t <= 0:
        raise ValueError(f"t must be positive, got {t!r}")
    p_max = max(image.shifted_poles)
    # slack covers roundoff in (max + 1) - max; the -1 margin itself is a
    # stability choice (real Stehfest abscissas start at ln2/t > 0)
    if p_max > -1.0 + 1e-9:
        raise ValueError(
            f"inversion needs every shifted pole <= -1; max is {p_max!r}")
    if settings.method == "dehoog":
        f_sh = _dehoog(lambda s: image_eval(image, s), t, p_max,
                       settings.dehoog_M, settings.dehoog_tol)
        precision = "binary64"
    elif settings.method == "stehfest":
        v, ctx = _stehfest(image.shifted_poles, t,
                           settings.stehfest_N, settings.stehfest_bits)
        f_sh = v
        precision = f"arbitrary({settings.stehfest_bits})"
    elif settings.method == "talbot":
        f_sh = _talbot(lambda s: image_eval(image, s), t, settings.talbot_M)
        precision = "binary64"
    else:
        raise ValueError(f"unknown inversion method {settings.method!r}")
    if f_sh == 0:
        return result_from_log(-math.inf, 1, settings.method, precision)
    sign = 1 if f_sh > 0 else -1
    if settings.method == "stehfest":
        log_abs = image.shift * t + float(ctx.log(abs(f_sh)))
    else:
        log_abs = image.shift * t + math.log(abs(f_sh))
    return result_from_log(log_abs, sign, settings.method, precision)


def scaled_c(nat: NaturalParams, t: float) -> float:
    """c(t) = t^{K-1} C(t*eta), the function the image transforms.

    Uses the closed form when its own diagnostics say it is trustworthy,
    the oracle otherwise.
    """
    if t <= 0:
        raise ValueError(f"t must be positive, got {t!r}")
    from . import closed_form, oracle, repeated  # local: avoid import cycles

    scaled = NaturalParams(tuple(t * e for e in nat.eta))
    try:
        res = closed_form.norm_const_closed(scaled, "binary64")
    except DegenerateParameters:
        # tied after scaling (e.g. eta = 0): the exact route
        ms = repeated.collapse_params(scaled.full())
        return t ** (nat.dim - 1) * repeated.norm_const_repeated(ms).value
    if res.diagnostics is not None and res.diagnostics.digits_lost_estimate >= 6:
        res = oracle.norm_const_oracle(scaled)
    return t ** (nat.dim - 1) * res.value
