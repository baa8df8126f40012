"""Mellin transforms of elementary iterated integrals over a saddle arc.

For monomial dx-forms ``x**(m_i - 1) y**(n_i) dx`` the Mellin transform of
``int w_1 ... w_l`` along ``{x**l1 y**l2 = t}`` (x increasing, ``w_1``
innermost at the earliest point) is ``l1**-l`` times the compensator

    prod_{j=0}^{l} (s + v_j)**-1,
    v_j = l1**-1 * sum_{i<=j} m_i + l2**-1 * sum_{i>j} n_i.

General forms expand into monomials; the kept coefficients obey
``|c_alpha| <= C 2**-|alpha|`` with ``|alpha| = sum (m_i + n_i + 2M)``.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Sequence

from ._numbers import coerce, is_zero, le, maximum
from .mellin import LogMonomialSeries, RationalMellin, inverse_mellin, partial_fractions
from .saddle import EdgeSeries, FormSeries, SaddleChart, ValidationError, pullback_form

__all__ = [
    "MultiIndex",
    "MellinSeries",
    "pole_vector",
    "compensator",
    "monomial_mellin",
    "elementary_mellin",
    "edge_elementary",
    "EdgeFitError",
]

#: product counts above this switch the discarded-tail bound to the envelope mass
EXACT_TAIL_LIMIT = 200_000


class EdgeFitError(ValueError):
    """Fitted edge coefficients reproduce their samples too poorly."""


@dataclass(frozen=True, order=True)
class MultiIndex:
    entries: tuple[int, ...]

    def __post_init__(self):
        entries = tuple(int(e) for e in self.entries)
        if not entries or len(entries) % 2:
            raise ValueError("a multi-index has 2l >= 2 entries")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def from_pairs(cls, pairs: Sequence[tuple[int, int]]) -> "MultiIndex":
        return cls(tuple(e for pair in pairs for e in pair))

    @property
    def length(self) -> int:
        return len(self.entries) // 2

    @property
    def pairs(self) -> list[tuple[int, int]]:
        e = self.entries
        return [(e[2 * i], e[2 * i + 1]) for i in range(self.length)]

    def weight(self, pole_bound: int) -> int:
        """``|alpha| = sum (m_i + n_i + 2M)``; non-negative for admissible indices."""
        return sum(self.entries) + 2 * pole_bound * self.length

    def check(self, chart: SaddleChart) -> None:
        if min(self.entries) < chart.min_index:
            raise ValidationError(f"multi-index {self.entries} has an entry not above -M")


def pole_vector(alpha: MultiIndex | Sequence[int], chart: SaddleChart) -> tuple[Fraction, ...]:
    """Shifts ``v_0 .. v_l``; the compensator has poles at ``s = -v_j``."""
    if not isinstance(alpha, MultiIndex):
        alpha = MultiIndex(tuple(alpha))
    pairs = alpha.pairs
    ms = [Fraction(m) for m, _ in pairs]
    ns = [Fraction(n) for _, n in pairs]
    l = len(pairs)
    return tuple(sum(ms[:j], Fraction(0)) / chart.lambda1 + sum(ns[j:], Fraction(0)) / chart.lambda2
                 for j in range(l + 1))


@lru_cache(maxsize=65536)
def _compensator_from_shifts(shifts: tuple[Fraction, ...]) -> RationalMellin:
    return partial_fractions([Fraction(1)], Counter(shifts))


def compensator(alpha: MultiIndex | Sequence[int], chart: SaddleChart) -> RationalMellin:
    """Generalized compensator ``prod_j (s + v_j)**-1`` in partial fractions."""
    return _compensator_from_shifts(tuple(sorted(pole_vector(alpha, chart))))


def monomial_mellin(monomials: Sequence, chart: SaddleChart) -> RationalMellin:
    """Exact Mellin transform for a word of monomial forms.

    ``monomials`` holds ``((m, n), kind)`` with ``kind`` in ``{"dx", "dy"}``.
    dy entries are pulled back to dx first, which contributes
    ``-l1/l2`` per entry.
    """
    factor = Fraction(1) / chart.lambda1 ** len(monomials)
    pairs = []
    for (m, n), kind in monomials:
        if kind == "dx":
            form = FormSeries(dx={(m, n): 1})
        elif kind == "dy":
            form = FormSeries(dy={(m, n): 1})
        else:
            raise ValueError(f"monomial kind must be 'dx' or 'dy', got {kind!r}")
        pulled = pullback_form(chart, form)
        factor *= pulled.dx[(m, n)]
        pairs.append((m, n))
    return compensator(MultiIndex.from_pairs(pairs), chart) * factor


def _weight_tail_mass(l: int, N: int) -> Fraction:
    """``sum_{|alpha| > N} 2**-|alpha|`` over admissible length-l multi-indices.

    Shifted entries ``m + M, n + M`` are positive integers, so the number of
    indices of weight ``k`` is ``C(k-1, 2l-1)`` and the total mass is 1.
    """
    r = 2 * l
    kept = sum((Fraction(math.comb(k - 1, r - 1), 2 ** k) for k in range(r, N + 1)), Fraction(0))
    return 1 - kept


def _pair_tail_mass(K: int) -> Fraction:
    """``sum_{k > K} (k - 1) 2**-k``: mass of index pairs with shifted weight above K."""
    if K < 2:
        return Fraction(1)
    kept = sum((Fraction(k - 1, 2 ** k) for k in range(2, K + 1)), Fraction(0))
    return 1 - kept


def _lowest_shift(chart: SaddleChart, l: int) -> Fraction:
    e = Fraction(chart.min_index)
    return min(e * (Fraction(j) / chart.lambda1 + Fraction(l - j) / chart.lambda2)
               for j in range(l + 1))


@dataclass(frozen=True)
class MellinSeries:
    """Truncated sum ``sum c_alpha * ell_alpha`` with a certified remainder.

    ``discarded`` is a majorant series (evaluated with ``|log t|``) bounding
    the time-domain contribution of every term that was not kept.
    """

    length: int
    terms: Mapping[MultiIndex, object]
    truncation: int
    envelope: object
    chart: SaddleChart
    discarded: LogMonomialSeries = field(default_factory=LogMonomialSeries)
    envelope_estimated: bool = False
    exact_tail: bool = True

    def __post_init__(self):
        M = self.chart.pole_bound
        for alpha, c in self.terms.items():
            if alpha.length != self.length:
                raise ValueError("multi-index length does not match the series length")
            bound = self.envelope * Fraction(2) ** (-alpha.weight(M))
            if not le(abs(c), bound):
                raise ValueError(f"kept term {alpha.entries} violates the envelope")

    def __len__(self) -> int:
        return len(self.terms)

    def rational(self) -> RationalMellin:
        out = RationalMellin()
        for alpha, c in self.terms.items():
            out = out + compensator(alpha, self.chart) * c
        return out

    def series(self) -> LogMonomialSeries:
        return inverse_mellin(self.rational())

    def pole_shifts(self) -> dict[Fraction, int]:
        """Union of compensator poles (shift -> largest multiplicity)."""
        out: dict[Fraction, int] = {}
        for alpha in self.terms:
            for v, k in Counter(pole_vector(alpha, self.chart)).items():
                out[v] = max(out.get(v, 0), k)
        return dict(sorted(out.items()))

    def coefficient_sum(self):
        return sum((abs(c) for c in self.terms.values()), Fraction(0))

    @property
    def certified(self) -> bool:
        """False when the discarded-tail bound leans on an estimated envelope."""
        return self.exact_tail or not self.envelope_estimated


def _enumerate(tables: list[list[tuple[tuple[int, int], object]]], M: int, cap: int | None):
    """Yield ``(pairs, coefficient, weight)`` for products, pruned by weight ``cap``."""
    l = len(tables)

    def rec(i, pairs, coeff, weight):
        if i == l:
            yield pairs, coeff, weight
            return
        for (m, n), c in tables[i]:
            w = weight + m + n + 2 * M
            if cap is not None and w + 2 * (l - i - 1) > cap:
                continue
            yield from rec(i + 1, pairs + ((m, n),), coeff * c, w)

    yield from rec(0, (), Fraction(1), 0)


def elementary_mellin(forms: Sequence[FormSeries], chart: SaddleChart, truncation: int) -> MellinSeries:
    """Expand ``int w_1 ... w_l`` over the saddle arc into compensators.

    Keeps every monomial product with ``|alpha| <= truncation`` and records a
    majorant for the rest: exact over the stored products when the forms are
    complete, otherwise the envelope mass ``C * sum 2**-|alpha|``.
    """
    l = len(forms)
    if l == 0:
        raise ValueError("an elementary integral needs at least one form")
    M = chart.pole_bound
    pulled = [pullback_form(chart, f) for f in forms]
    for f in pulled:
        for (m, n) in f.dx:
            if m < chart.min_index or n < chart.min_index:
                raise ValidationError(f"index {(m, n)} must exceed -M (M = {chart.pole_bound})")
    scale = Fraction(1) / chart.lambda1 ** l
    envelope = scale * Fraction(4) ** (l * M)
    for f in pulled:
        envelope = envelope * f.envelope
    estimated = any(f.envelope_estimated for f in forms)
    if any(f.is_zero() for f in pulled):
        return MellinSeries(l, {}, truncation, envelope, chart, envelope_estimated=estimated)

    tables = [sorted(f.dx.items()) for f in pulled]
    terms: dict[MultiIndex, object] = {}
    for pairs, coeff, _ in _enumerate(tables, M, truncation):
        alpha = MultiIndex.from_pairs(pairs)
        terms[alpha] = terms.get(alpha, Fraction(0)) + coeff * scale
    terms = {a: c for a, c in sorted(terms.items()) if not is_zero(c)}
    if not terms:
        min_weight = sum(min(m + n + 2 * M for m, n in f.dx) for f in pulled)
        raise ValueError(
            f"truncation {truncation} keeps no term (smallest weight is {min_weight})")

    complete = all(f.complete for f in forms)
    discarded = LogMonomialSeries()
    norm = Fraction(1, math.factorial(l))
    exact_tail = complete and math.prod(len(t) for t in tables) <= EXACT_TAIL_LIMIT
    if exact_tail:
        # finite forms: bound each dropped product by t^{v_min} |log t|^l / l!
        atoms = []
        for pairs, coeff, weight in _enumerate(tables, M, None):
            if weight <= truncation:
                continue
            vmin = min(pole_vector(MultiIndex.from_pairs(pairs), chart))
            atoms.append(((vmin, l), abs(coeff * scale) * norm))
        discarded = LogMonomialSeries(atoms)
    else:
        mass = _weight_tail_mass(l, truncation)
        if not complete:
            stored = min(f.truncation for f in forms) + 2 * M
            mass += l * _pair_tail_mass(stored)
        if not is_zero(mass):
            discarded = LogMonomialSeries({(_lowest_shift(chart, l), l): envelope * mass * norm})
    return MellinSeries(l, terms, truncation, envelope, chart, discarded, estimated, exact_tail)


def edge_elementary(edge: EdgeSeries, residual_threshold: float = 1e-8) -> LogMonomialSeries:
    """Time-domain series of an edge-piece elementary integral (no log terms)."""
    if edge.residual is not None and edge.residual > residual_threshold:
        raise EdgeFitError(
            f"edge fit residual {edge.residual:.3g} exceeds threshold {residual_threshold:.3g}")
    return edge.as_series()
