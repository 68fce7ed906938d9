"""Exact normalizing constants for tied parameter values, and CC moments.

The closed-form sum requires strictly distinct parameters. When the full
vector contains ties, C factors as C_D over the distinct values times a
moment of the collapsed distribution, and that moment is a mixed partial
of C_D itself. Derivatives are taken two independent ways: truncated
Taylor (jet) arithmetic pushed through the closed form, and central
finite differences of the adaptive oracle.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Any, Sequence, Tuple

import mpmath
from mpmath.ctx_mp import MPContext

from ._jets import closed_sum_jet
from ._sigfig import agree_sig
from .errors import (AmbiguousTies, InvalidParameters, MomentInconsistent,
                     PrecisionExhausted)
from .oracle import OracleConfig, converge_mp
from .params import EvalResult, result_from_log

_MAX_TOTAL_ORDER = 12
_MAX_BITS = 65536


@dataclass(frozen=True)
class MultisetParams:
    """Distinct values with multiplicities; the collapsed form of a full
    K-vector containing ties."""
    values: Tuple[float, ...]
    multiplicities: Tuple[int, ...]

    def __post_init__(self):
        if len(self.values) != len(self.multiplicities) or not self.values:
            raise InvalidParameters("values and multiplicities must be "
                                    "nonempty and of equal length")
        if not all(math.isfinite(v) for v in self.values):
            raise InvalidParameters("values must be finite")
        if len(set(self.values)) != len(self.values):
            raise InvalidParameters("values must be pairwise distinct")
        if not all(isinstance(r, int) and r >= 1 for r in self.multiplicities):
            raise InvalidParameters("multiplicities must be integers >= 1")

    @property
    def dim(self) -> int:
        return sum(self.multiplicities)


@dataclass(frozen=True)
class MomentIndex:
    """Exponents a_i of the requested moment E[prod u_i^{a_i}]."""
    orders: Tuple[int, ...]

    def __post_init__(self):
        if not self.orders:
            raise InvalidParameters("orders must be nonempty")
        if not all(isinstance(a, int) and a >= 0 for a in self.orders):
            raise InvalidParameters("orders must be integers >= 0")

    @property
    def total(self) -> int:
        return sum(self.orders)


def collapse_params(eta_full: Sequence[float], tie_tol: float = 0.0) -> MultisetParams:
    """Single-linkage collapse of a full K-vector into distinct values.

    Entries are clustered on the sorted vector: a gap <= tie_tol joins.
    Each cluster is replaced by its mean. Chaining can silently merge
    entries farther apart than the tolerance; that case is refused rather
    than guessed at.
    """
    vals = [float(v) for v in eta_full]
    if not vals or not all(math.isfinite(v) for v in vals):
        raise InvalidParameters("parameters must be nonempty and finite")
    if not (tie_tol >= 0.0):
        raise InvalidParameters("tie_tol must be >= 0")

    order = sorted(range(len(vals)), key=lambda i: vals[i])
    clusters: list[list[int]] = [[order[0]]]
    for i in order[1:]:
        if vals[i] - vals[clusters[-1][-1]] <= tie_tol:
            clusters[-1].append(i)
        else:
            clusters.append([i])

    for members in clusters:
        chain = [vals[i] for i in members]
        if chain[-1] - chain[0] > tie_tol:
            raise AmbiguousTies(
                f"single-linkage chained entries {chain} farther apart than "
                "tie_tol; collapse or separate them explicitly", chain=chain)

    # keep the caller's order: clusters sorted by first appearance
    clusters.sort(key=min)
    values = tuple(math.fsum(vals[i] for i in m) / len(m) for m in clusters)
    mults = tuple(len(m) for m in clusters)
    return MultisetParams(values=values, multiplicities=mults)


def _jet_converge(values: Sequence[float], orders: Tuple[int, ...],
                  target_sig_figs: int) -> tuple[Any, Any, int]:
    """(C_D, Taylor coefficient at `orders`, bits): the closed-form sum on
    jets, at doubling precision until both numbers stabilize."""
    bits = 128
    ctx = MPContext()
    ctx.prec = bits
    zero = (0,) * len(orders)

    def run(c):
        jet = closed_sum_jet([c.mpf(v) for v in values], orders, c)
        return jet.coefficient(zero), jet.coefficient(orders)

    prev = run(ctx)
    while bits * 2 <= _MAX_BITS:
        bits *= 2
        ctx.prec = bits
        cur = run(ctx)
        if (agree_sig(prev[0], cur[0], target_sig_figs)
                and agree_sig(prev[1], cur[1], target_sig_figs)):
            return cur[0], cur[1], bits
        prev = cur
    raise PrecisionExhausted(
        f"no {target_sig_figs}-figure agreement up to {_MAX_BITS} bits",
        last_two=(float(prev[1]), float(cur[1])))


def _moment_ad(values: Sequence[float], orders: Tuple[int, ...],
               target_sig_figs: int) -> float:
    c_d, coeff, bits = _jet_converge(values, orders, target_sig_figs)
    fact = math.prod(math.factorial(a) for a in orders)
    with mpmath.workprec(bits):
        return float(coeff * fact / c_d)


def _moment_fd(values: Sequence[float], orders: Tuple[int, ...]) -> float:
    """Tensor-product central differences of the adaptive oracle.

    The step is a power of two and every abscissa is built in >= 256-bit
    arithmetic, so the nodes are exact binary rationals: rounding them to
    binary64 first would be amplified by h^{-|a|} and swamp the estimate.
    Truncation is O(h^2) ~ 1e-12 relative; per-node oracle accuracy is
    pushed far enough below the h^{-|a|} amplification to keep rounding
    subdominant.
    """
    total = sum(orders)
    eval_sf = 20 + 7 * total
    cfg = OracleConfig(target_sig_figs=eval_sf,
                       initial_bits=max(160, 4 * eval_sf),
                       max_bits=_MAX_BITS)
    ctx = MPContext()
    ctx.prec = cfg.initial_bits + 128
    h = ctx.mpf(2) ** -20

    base = [ctx.mpf(v) for v in values]
    acc = ctx.mpf(0)
    for offsets in itertools.product(*(range(a + 1) for a in orders)):
        weight = 1
        for a, j in zip(orders, offsets):
            weight *= (-1) ** j * math.comb(a, j)
        nodes = [b + (ctx.mpf(a) / 2 - j) * h
                 for b, a, j in zip(base, orders, offsets)]
        acc += weight * converge_mp(nodes, cfg)[0]
    deriv = acc / h ** total
    c_d = converge_mp(base, cfg)[0]
    return float(deriv / c_d)


def cc_moment(values: Sequence[float], idx: MomentIndex,
              backend: str = "closed_form_ad", target_sig_figs: int = 13) -> float:
    """E_{u ~ CC_D(values)}[prod u_i^{a_i}], as a mixed partial of C_D.

    backend "closed_form_ad" differentiates the closed form with jets;
    "oracle_fd" central-differences the oracle; "cross" runs both and
    refuses to answer if they disagree at 4 significant figures.
    """
    vals = tuple(float(v) for v in values)
    if len(vals) < 2:
        raise InvalidParameters("moments need D >= 2 distinct values; "
                                "D = 1 is a point mass handled by the caller")
    if len(set(vals)) != len(vals) or not all(math.isfinite(v) for v in vals):
        raise InvalidParameters("values must be finite and pairwise distinct")
    if len(idx.orders) != len(vals):
        raise InvalidParameters("orders and values must have equal length")
    if idx.total > _MAX_TOTAL_ORDER:
        raise InvalidParameters(f"total order {idx.total} exceeds "
                                f"{_MAX_TOTAL_ORDER}")

    if backend == "closed_form_ad":
        return _moment_ad(vals, idx.orders, target_sig_figs)
    if backend == "oracle_fd":
        return _moment_fd(vals, idx.orders)
    if backend == "cross":
        ad = _moment_ad(vals, idx.orders, target_sig_figs)
        fd = _moment_fd(vals, idx.orders)
        if not agree_sig(ad, fd, 4):
            raise MomentInconsistent(
                f"derivative backends disagree: ad={ad!r} fd={fd!r}")
        return ad
    raise InvalidParameters(f"unknown backend {backend!r}")


def norm_const_repeated(ms: MultisetParams) -> EvalResult:
    """C over the full K-vector that ms collapses, handled exactly.

    C_K = C_D(values) * E[prod u_i^{r_i-1} / (r_i-1)!]; the expectation is
    a Taylor coefficient of C_D divided by C_D, so the product telescopes
    to the raw jet coefficient at orders r_i - 1.
    """
    k_dim = ms.dim
    if len(ms.values) == 1:
        # degenerate CC_1 is a point mass at u = 1
        log_abs = ms.values[0] - math.lgamma(k_dim)
        return result_from_log(log_abs, 1, method="repeated",
                               precision="binary64")

    orders = tuple(r - 1 for r in ms.multiplicities)
    _, coeff, bits = _jet_converge(ms.values, orders, target_sig_figs=13)
    if coeff <= 0:
        raise PrecisionExhausted("normalizing constant came out nonpositive",
                                 last_two=(float(coeff), float(coeff)))
    with mpmath.workprec(bits):
        log_abs = float(mpmath.log(coeff))
    return EvalResult(value=float(coeff), log_abs=log_abs, sign=1,
                      method="repeated", precision=f"arbitrary({bits})")
