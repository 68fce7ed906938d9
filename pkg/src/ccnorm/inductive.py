"""Dimension-recursion evaluation of C(eta).

Each sweep contracts the parameter list by one dimension through the
update c~_i = (e^{xi_i} c_1 - c_{i+1}) / xi_i, xi_i = eta_k - eta_{k+i};
after K-1 sweeps the single surviving entry is C(eta). The K=2 base update
is the continuous-Bernoulli constant (e^xi - 1)/xi, which switches to its
Taylor series near xi = 0; deeper sweeps have no such series (their
numerators mix different partial constants), so near-ties there are a
diagnostics matter and exact ties an error.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Optional

import numpy as np

from .closed_form import Precision, _DTYPE, cancellation_diagnostics
from .errors import DegenerateParameters, OverflowInSummand
from .params import EvalResult, NaturalParams, result_from_log

TAYLOR_SWITCH = 1e-2  # |xi| below this uses the series in the base case
TAYLOR_TERMS = 12     # truncation below 1e-16 at the switch point


@dataclass(frozen=True)
class OrderingStrategy:
    """How the full K-vector is ordered before the recursion."""

    kind: Literal["as_given", "ascending", "descending", "random"] = "as_given"
    seed: Optional[int] = None

    def __post_init__(self) -> None:
        if self.kind == "random" and self.seed is None:
            raise ValueError("random ordering needs a seed for reproducibility")

    def apply(self, full: tuple[float, ...]) -> tuple[float, ...]:
        if self.kind == "as_given":
            return full
        if self.kind == "ascending":
            return tuple(sorted(full))
        if self.kind == "descending":
            return tuple(sorted(full, reverse=True))
        perm = np.random.default_rng(self.seed).permutation(len(full))
        return tuple(full[i] for i in perm)


def cb_norm_taylor(xi: float, n_terms: int) -> float:
    """Series for (e^xi - 1)/xi: sum_{m<n} xi^m / (m+1)!."""
    if n_terms < 2:
        raise ValueError("n_terms must be >= 2")
    total = 0.0
    term = 1.0  # xi^m / m!
    for m in range(n_terms):
        total += term / (m + 1)
        term *= xi / (m + 1)
    return total


def norm_const_inductive(nat: NaturalParams,
                         order: OrderingStrategy = OrderingStrategy(),
                         precision: Precision = "binary64") -> EvalResult:
    """C(eta) by the recursion, every intermediate in the chosen format.

    The ordering permutes the full K-vector (implicit 0 included); the
    permuted vector is re-normalized to a zero last entry, whose exact
    e^a compensation is applied to the reported magnitude.
    """
    dtype = _DTYPE[precision]
    ordered = order.apply(nat.full())
    a = ordered[-1]
    work = np.asarray([v - a for v in ordered], dtype=dtype)
    k_dim = work.size

    near_tie = False
    c = np.ones(k_dim, dtype=dtype)
    for k in range(k_dim - 1):
        xi = work[k] - work[k + 1:]
        if np.any(xi == 0):
            raise DegenerateParameters(
                "tied parameters in the recursion; use the repeated-value backend")
        if float(np.min(np.abs(xi))) < TAYLOR_SWITCH:
            if k_dim == 2:
                c = np.asarray([cb_norm_taylor(float(xi[0]), TAYLOR_TERMS)],
                               dtype=dtype)
                break
            near_tie = True
        with np.errstate(over="ignore"):
            c = (np.exp(xi) * c[0] - c[1:]) / xi
        if not np.all(np.isfinite(c)):
            raise OverflowInSummand(
                f"recursion intermediate exceeds {precision} range")

    c1 = float(c[0])
    diagnostics = cancellation_diagnostics(nat) if near_tie else None
    if c1 == 0.0:
        return result_from_log(-math.inf, 1, "inductive", precision, diagnostics)
    return result_from_log(math.log(abs(c1)) + a, 1 if c1 > 0 else -1,
                           "inductive", precision, diagnostics)
