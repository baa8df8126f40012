"""Dense univariate polynomials as ascending coefficient lists.

Index ``i`` holds the coefficient of ``s**i``. Works for any coefficient
type supporting ring operations (Fraction, mpf, int).
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping, Sequence

Poly = list


def trim(p: Sequence) -> Poly:
    out = list(p)
    while out and out[-1] == 0:
        out.pop()
    return out


def degree(p: Sequence) -> int:
    return len(trim(p)) - 1


def add(p: Sequence, q: Sequence) -> Poly:
    n = max(len(p), len(q))
    out = [0] * n
    for i, c in enumerate(p):
        out[i] = out[i] + c
    for i, c in enumerate(q):
        out[i] = out[i] + c
    return trim(out)


def scale(p: Sequence, c) -> Poly:
    return trim([c * a for a in p])


def mul(p: Sequence, q: Sequence) -> Poly:
    if not p or not q:
        return []
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a == 0:
            continue
        for j, b in enumerate(q):
            out[i + j] = out[i + j] + a * b
    return trim(out)


def power(p: Sequence, k: int) -> Poly:
    out: Poly = [Fraction(1)]
    for _ in range(k):
        out = mul(out, p)
    return out


def from_factors(factors: Mapping[Fraction, int]) -> Poly:
    """Expand prod (s + a)**k over ``factors = {a: k}``."""
    out: Poly = [Fraction(1)]
    for a in sorted(factors):
        out = mul(out, power([a, Fraction(1)], factors[a]))
    return out


def divmod_poly(num: Sequence, den: Sequence) -> tuple[Poly, Poly]:
    num = trim(num)
    den = trim(den)
    if not den:
        raise ZeroDivisionError("polynomial division by zero")
    rem = list(num)
    dq = len(rem) - len(den)
    if dq < 0:
        return [], rem
    quot = [Fraction(0)] * (dq + 1)
    lead = den[-1]
    for i in range(dq, -1, -1):
        c = rem[i + len(den) - 1] / lead
        quot[i] = c
        if c == 0:
            continue
        for j, d in enumerate(den):
            rem[i + j] = rem[i + j] - c * d
    return trim(quot), trim(rem[: len(den) - 1])


def compose_shift(p: Sequence, shift) -> Poly:
    """Coefficients of ``p(u + shift)`` in ``u`` (Horner)."""
    out: Poly = []
    for c in reversed(list(p)):
        out = add(mul(out, [shift, Fraction(1)]), [c])
    return out


def series_divide(num: Sequence, den: Sequence, order: int) -> Poly:
    """First ``order`` Taylor coefficients of ``num/den`` at 0; needs den[0] != 0."""
    den = list(den) or [0]
    if den[0] == 0:
        raise ZeroDivisionError("series division needs a nonzero constant term")
    out = []
    for i in range(order):
        acc = num[i] if i < len(num) else 0
        for j in range(1, min(i, len(den) - 1) + 1):
            acc = acc - den[j] * out[i - j]
        out.append(acc / den[0])
    return out


def evaluate(p: Sequence, x):
    acc = 0
    for c in reversed(list(p)):
        acc = acc * x + c
    return acc


def derivative(p: Sequence) -> Poly:
    return trim([i * c for i, c in enumerate(p)][1:])
