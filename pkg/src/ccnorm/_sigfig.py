"""Significant-figure rounding and agreement checks.

Agreement to n significant figures means: round both values to n
significant decimal digits and compare for equality. Rounding is done on
(sign, decimal exponent, digit tuple) so that values of different binary
types, including mpmath floats, compare consistently.
"""
from __future__ import annotations

import math
from typing import Any

import mpmath


def round_sig(x: Any, n: int) -> tuple[int, int, int]:
    """Round to n significant decimal digits.

    Returns (sign, exponent, mantissa) with 10^(n-1) <= mantissa < 10^n,
    such that x ~ sign * mantissa * 10^(exponent - n + 1). Zero maps to
    (0, 0, 0). n must be >= 1.
    """
    if n < 1:
        raise ValueError("need at least one significant digit")
    # work above the requested digit count so values produced at any
    # precision (including other mpmath contexts) compare exactly
    with mpmath.workdps(max(25, n + 15)):
        xm = mpmath.mpf(x)
        if xm == 0:
            return (0, 0, 0)
        sign = 1 if xm > 0 else -1
        a = abs(xm)
        e = int(mpmath.floor(mpmath.log10(a)))
        # scale to n digits and round to nearest integer, ties to even
        scaled = a * mpmath.mpf(10) ** (n - 1 - e)
        m = int(mpmath.nint(scaled))
    if m >= 10**n:  # rounding carried, e.g. 9.99 -> 10.0
        m //= 10
        e += 1
    return (sign, e, m)


def agree_sig(x: Any, y: Any, n: int) -> bool:
    """True when x and y round to the same n-significant-figure value."""
    try:
        return round_sig(x, n) == round_sig(y, n)
    except (ValueError, OverflowError):
        return False


def digits_agreeing(x: float, y: float) -> float:
    """Continuous count of matching leading digits, -log10 of the relative
    difference; 0 when not even the order of magnitude matches."""
    if not (math.isfinite(x) and math.isfinite(y)) or y == 0:
        return 0.0
    rel = abs(mpmath.mpf(x) - mpmath.mpf(y)) / abs(mpmath.mpf(y))
    if rel == 0:
        return float(17)
    return max(0.0, -float(mpmath.log10(rel)))
