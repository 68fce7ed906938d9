"""Truncated multivariate Taylor (jet) arithmetic over mpmath contexts.

A jet stores the Taylor coefficients of a function of D formal variables,
truncated to per-variable degree caps. Differentiating the closed-form sum
then reduces to evaluating it once on jets seeded with the expansion
point: the coefficient of t^a is the mixed partial divided by a!.

Everything runs in the caller's arbitrary-precision context; the closed
form being differentiated is cancellation-prone, so fixed binary64 jets
would lose the very digits the caller is after.
"""
from __future__ import annotations

from typing import Any, Dict, Sequence, Tuple

Expt = Tuple[int, ...]


class Jet:
    __slots__ = ("ctx", "caps", "co")

    def __init__(self, ctx: Any, caps: Tuple[int, ...], co: Dict[Expt, Any]):
        self.ctx = ctx
        self.caps = caps
        self.co = co  # exponent tuple -> coefficient, zeros omitted

    # --- construction -------------------------------------------------
    @classmethod
    def const(cls, ctx: Any, caps: Tuple[int, ...], value: Any) -> "Jet":
        v = ctx.mpf(value)
        zero = (0,) * len(caps)
        return cls(ctx, caps, {zero: v} if v != 0 else {})

    @classmethod
    def var(cls, ctx: Any, caps: Tuple[int, ...], i: int, value: Any) -> "Jet":
        """value + t_i, the seed for differentiating in direction i."""
        j = cls.const(ctx, caps, value)
        if caps[i] >= 1:
            e = tuple(1 if k == i else 0 for k in range(len(caps)))
            j.co[e] = ctx.mpf(1)
        return j

    # --- ring operations ----------------------------------------------
    def __add__(self, other: "Jet") -> "Jet":
        co = dict(self.co)
        for e, c in other.co.items():
            s = co.get(e, 0) + c
            if s == 0:
                co.pop(e, None)
            else:
                co[e] = s
        return Jet(self.ctx, self.caps, co)

    def __sub__(self, other: "Jet") -> "Jet":
        co = dict(self.co)
        for e, c in other.co.items():
            s = co.get(e, 0) - c
            if s == 0:
                co.pop(e, None)
            else:
                co[e] = s
        return Jet(self.ctx, self.caps, co)

    def __mul__(self, other: "Jet") -> "Jet":
        caps = self.caps
        co: Dict[Expt, Any] = {}
        for ea, ca in self.co.items():
            for eb, cb in other.co.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                if any(x > m for x, m in zip(e, caps)):
                    continue
                co[e] = co.get(e, 0) + ca * cb
        return Jet(self.ctx, caps, {e: c for e, c in co.items() if c != 0})

    def __truediv__(self, other: "Jet") -> "Jet":
        return self * other.reciprocal()

    # --- analytic operations --------------------------------------------
    def _split(self) -> tuple[Any, "Jet"]:
        """(constant term, nilpotent part)."""
        zero = (0,) * len(self.caps)
        c0 = self.co.get(zero, self.ctx.mpf(0))
        co = {e: c for e, c in self.co.items() if e != zero}
        return c0, Jet(self.ctx, self.caps, co)

    def reciprocal(self) -> "Jet":
        c0, n = self._split()
        if c0 == 0:
            raise ZeroDivisionError("jet with zero constant term")
        # 1/(c0 + n) = (1/c0) sum_m (-n/c0)^m; n is nilpotent
        u = Jet(self.ctx, self.caps, {e: -c / c0 for e, c in n.co.items()})
        acc = Jet.const(self.ctx, self.caps, 1)
        term = Jet.const(self.ctx, self.caps, 1)
        for _ in range(sum(self.caps)):
            term = term * u
            if not term.co:
                break
            acc = acc + term
        return Jet(self.ctx, self.caps, {e: c / c0 for e, c in acc.co.items()})

    def exp(self) -> "Jet":
        c0, n = self._split()
        acc = Jet.const(self.ctx, self.caps, 1)
        term = Jet.const(self.ctx, self.caps, 1)
        for m in range(1, sum(self.caps) + 1):
            term = term * n
            if not term.co:
                break
            term = Jet(self.ctx, self.caps,
                       {e: c / m for e, c in term.co.items()})
            acc = acc + term
        scale = self.ctx.exp(c0)
        return Jet(self.ctx, self.caps, {e: c * scale for e, c in acc.co.items()})

    def coefficient(self, e: Expt) -> Any:
        return self.co.get(tuple(e), self.ctx.mpf(0))


def closed_sum_jet(values: Sequence[Any], caps: Tuple[int, ...], ctx: Any) -> Jet:
    """The closed-form sum evaluated on jets seeded at the full D-vector.

    The full-vector sum is shift-covariant as written, so no zero-last
    normalization is needed; the denominators' constant terms are the
    pairwise differences, nonzero because the values are distinct.
    """
    d = len(values)
    w = [Jet.var(ctx, caps, i, values[i]) for i in range(d)]
    total = Jet.const(ctx, caps, 0)
    for k in range(d):
        den = Jet.const(ctx, caps, 1)
        for i in range(d):
            if i != k:
                den = den * (w[k] - w[i])
        total = total + w[k].exp() / den
    return total
