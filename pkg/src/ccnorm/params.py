"""Parameter-vector domain types and the lambda/eta conversions.

Conventions. A distribution on the K-simplex is described by K-1 stored
numbers plus one implicit coordinate: simplex points store x_1..x_{K-1}
with x_K = 1 - sum, natural parameters store eta_1..eta_{K-1} with
eta_K = 0. Full K-vectors appear only at the CLI boundary and in the
repeated-value machinery, never inside NaturalParams.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import TYPE_CHECKING, Optional, Sequence

from .errors import InvalidParameters

if TYPE_CHECKING:  # pragma: no cover
    from .closed_form import CancellationReport

SIMPLEX_TOL = 1e-12  # absolute slack for sums produced by arithmetic

# full-vector lambda inputs are recognized by their sum; rounding noise in
# hand-written decimals motivates a looser gate than SIMPLEX_TOL
_LAMBDA_FULL_TOL = 1e-9

_TINY = 5e-324  # smallest positive subnormal, keeps log() finite


@dataclass(frozen=True)
class SimplexPoint:
    """Point on the K-simplex, stored as its first K-1 coordinates."""

    coords: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.coords) < 1:
            raise InvalidParameters("need K >= 2, got no stored coordinates")
        for i, c in enumerate(self.coords):
            if not math.isfinite(c) or c < 0:
                raise InvalidParameters(f"coordinate {i} = {c!r} not a finite nonnegative real")
        if sum(self.coords) > 1.0 + SIMPLEX_TOL:
            raise InvalidParameters(f"coordinates sum to {sum(self.coords)!r} > 1")

    @property
    def dim(self) -> int:
        return len(self.coords) + 1

    @property
    def last(self) -> float:
        return 1.0 - sum(self.coords)


@dataclass(frozen=True)
class NaturalParams:
    """Natural parameters eta_1..eta_{K-1}; eta_K is fixed at 0."""

    eta: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.eta) < 1:
            raise InvalidParameters("need K >= 2, got no parameters")
        for i, e in enumerate(self.eta):
            if not math.isfinite(e):
                raise InvalidParameters(f"eta[{i}] = {e!r} is not finite")

    @property
    def dim(self) -> int:
        return len(self.eta) + 1

    def full(self) -> tuple[float, ...]:
        """The overparameterized K-vector (eta_1, ..., eta_{K-1}, 0)."""
        return self.eta + (0.0,)


@dataclass(frozen=True)
class MeanParams:
    """Mean parameterization: a strictly interior simplex point."""

    lam: SimplexPoint

    def __post_init__(self) -> None:
        for i, c in enumerate(self.lam.coords):
            if c <= 0:
                raise InvalidParameters(f"lambda[{i}] = {c!r} must be strictly positive")
        if self.lam.last <= 0:
            raise InvalidParameters(f"implicit lambda_K = {self.lam.last!r} must be strictly positive")

    @property
    def dim(self) -> int:
        return self.lam.dim


@dataclass(frozen=True)
class EvalResult:
    """A computed value of C(eta) with its log-magnitude and provenance.

    value may be 0.0 or inf when exp(log_abs) leaves the double range;
    log_abs and sign always carry the full information.
    """

    value: float
    log_abs: float
    sign: int
    method: str
    precision: str  # "binary32" | "binary64" | "arbitrary(<bits>)"
    diagnostics: Optional["CancellationReport"] = None

    def __post_init__(self) -> None:
        if self.sign not in (-1, 1):
            raise InvalidParameters(f"sign must be +-1, got {self.sign!r}")
        if math.isfinite(self.value) and self.value != 0.0:
            recon = self.sign * math.exp(self.log_abs)
            if abs(self.value - recon) > 1e-12 * abs(self.value):
                raise InvalidParameters(
                    f"value {self.value!r} inconsistent with sign*exp(log_abs) = {recon!r}")

    @property
    def precision_bits(self) -> int:
        if self.precision == "binary32":
            return 24
        if self.precision == "binary64":
            return 53
        m = re.fullmatch(r"arbitrary\((\d+)\)", self.precision)
        if not m:
            raise ValueError(f"malformed precision tag {self.precision!r}")
        return int(m.group(1))


def result_from_log(log_abs: float, sign: int, method: str, precision: str,
                    diagnostics: Optional["CancellationReport"] = None) -> EvalResult:
    """Build an EvalResult, mapping log-range overflow/underflow to inf/0."""
    try:
        value = sign * math.exp(log_abs)
    except OverflowError:
        value = sign * math.inf
    return EvalResult(value=value, log_abs=log_abs, sign=sign, method=method,
                      precision=precision, diagnostics=diagnostics)


def lambda_to_eta(mean: MeanParams) -> NaturalParams:
    """eta_i = log(lambda_i / lambda_K)."""
    lam_k = mean.lam.last
    return NaturalParams(tuple(math.log(c / lam_k) for c in mean.lam.coords))


def eta_to_lambda(nat: NaturalParams) -> MeanParams:
    """Inverse log-ratio map, stabilized by max subtraction.

    Coordinates that underflow double precision are clamped to the smallest
    subnormal so the mean parameterization stays strictly interior (the
    log-ratio map must remain finite).
    """
    full = nat.full()
    m = max(full)
    w = [math.exp(e - m) for e in full]
    z = sum(w)
    lam = [max(v / z, _TINY) for v in w[:-1]]
    # the implicit lambda_K = 1 - sum can underflow too when the max sits in
    # an explicit coordinate; nudge the dominant entry down until it is positive
    while 1.0 - math.fsum(lam) <= 0.0:
        j = max(range(len(lam)), key=lam.__getitem__)
        lam[j] = math.nextafter(lam[j], 0.0)
    return MeanParams(SimplexPoint(tuple(lam)))


def log_density(x: SimplexPoint, nat: NaturalParams, log_c: float) -> float:
    """log p(x; eta) = eta . x_{1:K-1} - log C(eta); eta_K x_K adds 0."""
    if x.dim != nat.dim:
        raise InvalidParameters(f"dimension mismatch: point K={x.dim}, params K={nat.dim}")
    return math.fsum(e * c for e, c in zip(nat.eta, x.coords)) - log_c


def parse_eta_array(arr: Sequence[float]) -> tuple[NaturalParams, float]:
    """Interpret a CLI-boundary eta array; returns (params, log_shift).

    An array containing an exact zero is the full K-vector: it is
    normalized by subtracting its last entry a, which is exact at the
    distribution level (C(eta + a*1) = e^a C(eta)), and log_shift = a is
    returned for the caller to compensate. Any other array is already the
    reduced K-1 vector. A reduced vector containing 0 would tie the
    implicit eta_K anyway, so no valid input is misread.
    """
    vals = [float(v) for v in arr]
    if len(vals) >= 2 and any(v == 0.0 for v in vals):
        a = vals[-1]
        return NaturalParams(tuple(v - a for v in vals[:-1])), a
    return NaturalParams(tuple(vals)), 0.0


def parse_lambda_array(arr: Sequence[float]) -> MeanParams:
    """Interpret a CLI-boundary lambda array.

    An array summing to 1 (within 1e-9) is the full K-vector; otherwise it
    is the stored K-1 coordinates with lambda_K = 1 - sum implicit.
    """
    vals = [float(v) for v in arr]
    if len(vals) >= 2 and abs(sum(vals) - 1.0) <= _LAMBDA_FULL_TOL:
        vals = vals[:-1]
    return MeanParams(SimplexPoint(tuple(vals)))
