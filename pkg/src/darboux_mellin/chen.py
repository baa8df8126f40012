"""Iterated integrals over concatenated paths as polynomials in elementary ones.

Cutting the simplex ``0 <= u_1 <= ... <= u_k <= 1`` at the piece boundaries
leaves products of smaller simplices, one per piece, so

    int_{g_1 ... g_m} w_1 ... w_k = sum over weak compositions k_1 + ... + k_m = k
        prod_j int_{g_j} w_{a_j} ... w_{b_j}

with consecutive blocks ``[a_j .. b_j]`` of length ``k_j``. Empty blocks are
the empty integral 1 and are omitted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Mapping

__all__ = ["ElementarySymbol", "IteratedPolynomial", "decompose", "evaluate", "weak_compositions"]


@dataclass(frozen=True, order=True)
class ElementarySymbol:
    """``int_{piece} w_start ... w_stop`` (1-based, inclusive form range)."""

    piece: int
    start: int
    stop: int

    def __post_init__(self):
        if not 1 <= self.start <= self.stop:
            raise ValueError(f"invalid form range [{self.start}..{self.stop}]")
        if self.piece < 1:
            raise ValueError("piece indices are 1-based")

    def __str__(self) -> str:
        return f"E({self.piece},[{self.start}..{self.stop}])"


@dataclass(frozen=True)
class IteratedPolynomial:
    k: int
    m: int
    terms: tuple[tuple[int, tuple[ElementarySymbol, ...]], ...]

    def __post_init__(self):
        for coeff, factors in self.terms:
            if not isinstance(coeff, int):
                raise TypeError("coefficients must be integers")
            covered = []
            for sym in sorted(factors):
                if not 1 <= sym.piece <= self.m:
                    raise ValueError(f"{sym} refers to a missing piece")
                covered.extend(range(sym.start, sym.stop + 1))
            if covered != list(range(1, self.k + 1)):
                raise ValueError("factor ranges must partition 1..k in piece order")

    def __len__(self) -> int:
        return len(self.terms)

    def symbols(self) -> set[ElementarySymbol]:
        return {s for _, factors in self.terms for s in factors}

    def __str__(self) -> str:
        return " + ".join(
            (f"{c}*" if c != 1 else "") + "*".join(str(s) for s in factors)
            for c, factors in self.terms)


def weak_compositions(k: int, m: int) -> Iterator[tuple[int, ...]]:
    """All ``(k_1, ..., k_m)`` with ``k_j >= 0`` summing to ``k``; first part descending."""
    if m == 1:
        yield (k,)
        return
    for first in range(k, -1, -1):
        for rest in weak_compositions(k - first, m - 1):
            yield (first,) + rest


def decompose(k: int, m: int) -> IteratedPolynomial:
    """Normal form of a length-``k`` iterated integral over ``m`` pieces.

    >>> print(decompose(2, 2))
    E(1,[1..2]) + E(1,[1..1])*E(2,[2..2]) + E(2,[1..2])
    """
    if k < 1 or m < 1:
        raise ValueError("need k >= 1 and m >= 1")
    terms = []
    for parts in weak_compositions(k, m):
        factors = []
        pos = 1
        for piece, size in enumerate(parts, start=1):
            if size:
                factors.append(ElementarySymbol(piece, pos, pos + size - 1))
                pos += size
        terms.append((1, tuple(factors)))
    poly = IteratedPolynomial(k, m, tuple(terms))
    assert len(poly) == math.comb(k + m - 1, m - 1)
    return poly


def evaluate(poly: IteratedPolynomial, provider: Mapping[ElementarySymbol, object]):
    """Substitute values (numbers or series supporting ``+``/``*``) for the symbols."""
    missing = sorted(poly.symbols() - set(provider))
    if missing:
        raise KeyError("provider lacks " + ", ".join(str(s) for s in missing))
    total = 0
    for coeff, factors in poly.terms:
        value = coeff
        for sym in factors:
            value = value * provider[sym]
        total = total + value
    return total
