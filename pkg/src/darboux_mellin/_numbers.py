"""Coefficient coercion shared by the symbolic modules.

Exact inputs (int, Fraction, decimal strings) stay exact as ``Fraction``.
Binary floats and ``mpmath.mpf`` values become ``mpf`` and follow the
active mpmath working precision.
"""

from __future__ import annotations

import numbers
from fractions import Fraction
from typing import Union

import mpmath

#: default working precision (bits) for real-valued coefficients
DEFAULT_PRECISION = 128
#: real coefficients with magnitude below this are dropped on canonicalization
ZERO_TOL = mpmath.mpf("1e-30")

Coefficient = Union[Fraction, mpmath.mpf]


def as_rational(value) -> Fraction:
    """Convert exponents and pole locations to an exact ``Fraction``.

    Floats are read through their shortest decimal repr, so ``0.7`` means
    7/10 rather than the nearest binary double.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("boolean is not a rational number")
    if isinstance(value, numbers.Integral):
        return Fraction(int(value))
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, numbers.Real):
        return Fraction(repr(float(value)))
    if isinstance(value, mpmath.mpf):
        return Fraction(mpmath.nstr(value, 30))
    raise TypeError(f"cannot interpret {value!r} as a rational number")


def coerce(value) -> Coefficient:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("boolean is not a coefficient")
    if isinstance(value, numbers.Integral):
        return Fraction(int(value))
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, mpmath.mpf):
        return value
    if isinstance(value, numbers.Real):
        return mpmath.mpf(float(value))
    raise TypeError(f"unsupported coefficient {value!r}")


def is_zero(value: Coefficient) -> bool:
    if isinstance(value, Fraction):
        return value == 0
    return abs(value) <= ZERO_TOL


def is_exact(value) -> bool:
    return isinstance(value, (Fraction, int))


def to_mpf(value) -> mpmath.mpf:
    if isinstance(value, Fraction):
        return mpmath.mpf(value.numerator) / value.denominator
    return mpmath.mpf(value)


def magnitude(value) -> Coefficient:
    return abs(value)


def format_decimal(value) -> str:
    """17 significant digits, the lossless width for a double."""
    return f"{float(to_mpf(value)):.17g}"


def le(a, b) -> bool:
    """``a <= b`` across Fraction/mpf (mpmath does not compare with Fraction)."""
    if is_exact(a) and is_exact(b):
        return a <= b
    return to_mpf(a) <= to_mpf(b)


def maximum(values, default=Fraction(0)):
    best = None
    for v in values:
        if best is None or not le(v, best):
            best = v
    return default if best is None else best
