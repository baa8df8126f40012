"""Asymptotic expansions, certified tails and zero-free certificates.

Elements of the algebra generated by elementary integrals are carried as an
``Expansion``: an exactly known finite log-monomial series ``K`` plus a
majorant ``D`` with ``|f(t) - K(t)| <= D(t)`` (``D`` is evaluated with
``|log t|``). Products propagate the majorant through
``|fg - K_f K_g| <= |K_f| D_g + |K_g| D_f + D_f D_g``.

For a gap point ``s_p`` the partial sum keeps the monomials of ``K`` with
exponent below ``s_p``. What is left of ``K`` is bounded in two ways and the
smaller constant wins:

* directly, ``|c t^mu log^j t| <= |c| (j / (e (mu - s_p)))^j t^{s_p}``;
* through the inverse-Mellin contour around ``{Re s <= -s_p, |Im s| <= 1}``
  (only for expansions built from compensators, see ``_contour_constant``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import mpmath

from . import _poly
from ._numbers import DEFAULT_PRECISION, as_rational, coerce, is_exact, to_mpf
from .elementary import MellinSeries, pole_vector
from .mellin import LogMonomialSeries, RationalMellin, inverse_mellin
from .saddle import EdgeSeries

__all__ = [
    "Expansion",
    "as_expansion",
    "PoleLattice",
    "pole_lattice",
    "select_gap_point",
    "partial_sum",
    "TailCertificate",
    "tail_certificate",
    "tail_bound",
    "ZeroFreeCertificate",
    "certify_zero_free",
]


@dataclass(frozen=True)
class Expansion:
    """Finite series plus a pointwise majorant of everything it omits.

    ``compensators`` lists ``(|c_alpha|, shifts)`` when the series is a
    plain linear combination of compensators; it enables the contour bound.
    ``rigorous`` is False once any input (estimated envelope, fitted edge
    data) cannot back its bound.
    """

    series: LogMonomialSeries
    remainder: LogMonomialSeries = field(default_factory=LogMonomialSeries)
    compensators: tuple | None = None
    length: int = 0
    rigorous: bool = True

    def __add__(self, other) -> "Expansion":
        other = as_expansion(other)
        comp = None
        if self.compensators is not None and other.compensators is not None:
            comp = self.compensators + other.compensators
        return Expansion(self.series + other.series, self.remainder + other.remainder, comp,
                         max(self.length, other.length), self.rigorous and other.rigorous)

    __radd__ = __add__

    def __neg__(self) -> "Expansion":
        return Expansion(-self.series, self.remainder, self.compensators, self.length, self.rigorous)

    def __sub__(self, other) -> "Expansion":
        return self + (-as_expansion(other))

    def __rsub__(self, other) -> "Expansion":
        return as_expansion(other) - self

    def __mul__(self, other) -> "Expansion":
        if isinstance(other, (int, float, Fraction, mpmath.mpf)):
            c = coerce(other)
            comp = None
            if self.compensators is not None:
                comp = tuple((abs(c) * a, v) for a, v in self.compensators)
            return Expansion(self.series * c, self.remainder * abs(c), comp, self.length,
                             self.rigorous)
        other = as_expansion(other)
        rem = (self.series.majorant() * other.remainder + other.series.majorant() * self.remainder
               + self.remainder * other.remainder)
        return Expansion(self.series * other.series, rem, None, self.length + other.length,
                         self.rigorous and other.rigorous)

    __rmul__ = __mul__

    def __call__(self, t) -> float:
        return float(self.series.evaluate(t))


def as_expansion(f) -> Expansion:
    if isinstance(f, Expansion):
        return f
    if isinstance(f, MellinSeries):
        comp = tuple((abs(c), pole_vector(alpha, f.chart)) for alpha, c in f.terms.items())
        return Expansion(f.series(), f.discarded, comp, f.length, f.certified)
    if isinstance(f, RationalMellin):
        return Expansion(inverse_mellin(f))
    if isinstance(f, LogMonomialSeries):
        return Expansion(f)
    if isinstance(f, EdgeSeries):
        # a truncated edge series says nothing about its own tail
        return Expansion(f.as_series(), rigorous=f.certified and f.residual is None)
    if isinstance(f, (int, float, Fraction, mpmath.mpf)):
        return Expansion(LogMonomialSeries.constant(f))
    raise TypeError(f"cannot build an expansion from {type(f).__name__}")


@dataclass(frozen=True)
class PoleLattice:
    """Poles ``(location, multiplicity)`` sorted by decreasing location."""

    poles: tuple[tuple[Fraction, int], ...]
    depth: int
    generators: tuple[Fraction, Fraction] | None = None

    def locations(self) -> list[Fraction]:
        return [loc for loc, _ in self.poles]

    def count_in(self, lo, hi) -> int:
        return sum(k for loc, k in self.poles if lo <= loc <= hi)


def _series_shifts(series: LogMonomialSeries) -> dict[Fraction, int]:
    out: dict[Fraction, int] = {}
    for (mu, j), _ in series.items():
        out[mu] = max(out.get(mu, 0), j + 1)
    return out


def _shifts(f) -> dict[Fraction, int]:
    if isinstance(f, RationalMellin):
        return f.poles()
    if isinstance(f, MellinSeries):
        return f.pole_shifts()
    if isinstance(f, LogMonomialSeries):
        return _series_shifts(f)
    if isinstance(f, Expansion):
        out = _series_shifts(f.series)
        for _, shifts in f.compensators or ():
            for v in set(shifts):
                out[v] = max(out.get(v, 0), shifts.count(v))
        return out
    if isinstance(f, (list, tuple)):
        # product: poles at sums w_kappa, orders add minus one per extra factor
        acc: dict[Fraction, int] = {Fraction(0): 1}
        for factor in f:
            nxt: dict[Fraction, int] = {}
            for a, ka in acc.items():
                for b, kb in _shifts(factor).items():
                    nxt[a + b] = max(nxt.get(a + b, 0), ka + kb - 1)
            acc = nxt
        return acc
    return _shifts(as_expansion(f))


def pole_lattice(f, depth: int) -> PoleLattice:
    """Poles of the Mellin transform of ``f`` located at or right of ``-(depth + 1)``.

    A list or tuple is read as a product of its entries.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    gens = None
    if isinstance(f, MellinSeries):
        gens = (1 / f.chart.lambda1, 1 / f.chart.lambda2)
    shifts = _shifts(f)
    poles = tuple((-a, k) for a, k in sorted(shifts.items()) if a <= depth + 1)
    return PoleLattice(poles, depth, gens)


def select_gap_point(lattice: PoleLattice, p: int) -> tuple[Fraction, Fraction]:
    """Midpoint ``s_p`` of the widest pole-free gap of ``[p, p+1]`` and its pole distance.

    Ties go to the larger ``s_p``. The distance is measured to every pole of
    the lattice, so it is at least half the chosen gap.
    """
    if p < 1:
        raise ValueError("p must be >= 1")
    if lattice.depth < p:
        raise ValueError(f"lattice depth {lattice.depth} does not reach p = {p}")
    lo, hi = Fraction(p), Fraction(p + 1)
    shifts = sorted({-loc for loc, _ in lattice.poles})
    inside = [a for a in shifts if lo < a < hi]
    marks = [lo] + inside + [hi]
    best = None
    for a, b in zip(marks, marks[1:]):
        width = b - a
        if best is None or width >= best[0]:
            best = (width, (a + b) / 2)
    assert best is not None and best[0] > 0
    s_p = best[1]
    rho = min((abs(s_p - a) for a in shifts), default=best[0] / 2)
    return s_p, rho


def _gap(f, p: int) -> tuple[Expansion, Fraction, Fraction]:
    expansion = as_expansion(f)
    lattice = pole_lattice(expansion, p + 1)
    s_p, rho = select_gap_point(lattice, p)
    return expansion, s_p, rho


def partial_sum(f, p: int) -> LogMonomialSeries:
    """Residues of ``t**-s M f(s)`` at the poles right of ``-s_p``."""
    expansion, s_p, _ = _gap(f, p)
    return expansion.series.below(s_p)


@dataclass(frozen=True)
class TailCertificate:
    """``|f(t) - f_p(t)| <= C_total * t**s_p + truncation(t)`` on ``(0, 1]``.

    ``d`` is the pole-distance exponent used by the contour estimate
    (``length + 1``, 0 when only the direct estimate applies);
    ``reference_exponent`` is the asymptotic ``l**2`` growth rate, reported
    for comparison only.
    """

    p: int
    s_p: Fraction
    rho: Fraction
    C_total: object
    d: int
    reference_exponent: int
    method: str
    truncation: LogMonomialSeries
    rigorous: bool

    def bound(self, t, prec: int = DEFAULT_PRECISION) -> float:
        with mpmath.workprec(prec):
            t = mpmath.mpf(t)
            value = to_mpf(self.C_total) * mpmath.power(t, to_mpf(self.s_p))
            if self.truncation:
                value += self.truncation.evaluate(t, prec=prec, absolute_log=True)
            # round outward so the float never undercuts the bound
            return float(value * (1 + mpmath.mpf(2) ** -40))

    def as_dict(self) -> dict:
        return {
            "p": self.p,
            "s_p": _json_number(self.s_p),
            "rho": _json_number(self.rho),
            "C_total": _json_number(self.C_total),
            "d": self.d,
            "reference_exponent": self.reference_exponent,
            "method": self.method,
            "truncation_terms": len(self.truncation),
            "rigorous": self.rigorous,
        }


def _json_number(x):
    if isinstance(x, Fraction) and x.denominator == 1:
        return int(x)
    return float(f"{float(to_mpf(x)):.17g}")


def _direct_constant(rest: LogMonomialSeries, s_p: Fraction):
    # sup_{0<t<=1} t^delta |log t|^j = (j / (e delta))^j
    total = mpmath.mpf(0)
    for (mu, j), c in rest.items():
        delta = to_mpf(mu - s_p)
        factor = (j / (mpmath.e * delta)) ** j if j else mpmath.mpf(1)
        total += abs(to_mpf(c)) * factor
    return total


def _contour_constant(compensators, s_p: Fraction):
    """Constant for the remainder of ``sum c_alpha M^-1 ell_alpha`` beyond ``s_p``.

    The remainder of one term is ``(1/2 pi i) int t^{-s} ell_alpha(s) ds`` over
    the boundary of ``{Re s <= -s_p, |Im s| <= 1}``, where ``|t^{-s}| <= t^{s_p}``:

    * vertical side (length 2): ``|s + v_j| >= |v_j - s_p|``, giving
      ``t^{s_p} prod_j |v_j - s_p|^{-1} / pi``;
    * each horizontal ray: every factor has ``|s + v_j| >= 1``; keep two of
      them and apply Cauchy-Schwarz with ``int dsigma / (1 + sigma^2) = pi``,
      giving ``t^{s_p} / 2`` per ray.

    The far vertical side vanishes for ``t <= 1`` since ell decays like
    ``|s|^{-2}``.
    """
    total = mpmath.mpf(0)
    for amp, shifts in compensators:
        if len(shifts) < 2:
            return None
        prod = mpmath.mpf(1)
        for v in shifts:
            gap = abs(v - s_p)
            if gap == 0:
                return None
            prod /= to_mpf(gap)
        total += to_mpf(amp) * (prod / mpmath.pi + 1)
    return total


def tail_certificate(f, p: int) -> TailCertificate:
    expansion, s_p, rho = _gap(f, p)
    rest = expansion.series.above(s_p)
    direct = _direct_constant(rest, s_p)
    constant, method, d = direct, "direct", 0
    if expansion.compensators is not None and rest:
        contour = _contour_constant(expansion.compensators, s_p)
        if contour is not None and contour < direct:
            constant, method, d = contour, "contour", expansion.length + 1
    return TailCertificate(
        p=p,
        s_p=s_p,
        rho=rho,
        C_total=constant,
        d=d,
        reference_exponent=expansion.length ** 2,
        method=method,
        truncation=expansion.remainder,
        rigorous=expansion.rigorous,
    )


def tail_bound(f, p: int, t) -> float:
    """Certified ``B(p, t) >= |f(t) - f_p(t)|`` for ``t`` in ``(0, 1]``."""
    if not 0 < float(t) <= 1:
        raise ValueError("t must lie in (0, 1]")
    return tail_certificate(f, p).bound(t)


@dataclass(frozen=True)
class ZeroFreeCertificate:
    """Outcome of :func:`certify_zero_free`.

    ``status`` is ``"zero_free"`` (no zeros on ``(0, t_star]``),
    ``"zero_to_order"`` (every coefficient below ``s_order`` vanishes) or
    ``"inconclusive"`` (with ``reason``).
    """

    status: str
    order: int
    mu: Fraction | None = None
    leading: tuple = ()
    t_star: float | None = None
    residual_bound: float | None = None
    reason: str = ""

    def as_dict(self) -> dict:
        out = {"status": self.status, "order": self.order}
        if self.mu is not None:
            out["mu"] = _json_number(self.mu)
            out["leading_log_poly"] = [_json_number(c) for c in self.leading]
        if self.t_star is not None:
            out["t_star"] = float(f"{self.t_star:.17g}")
        if self.residual_bound is not None:
            out["residual_bound"] = float(f"{self.residual_bound:.17g}")
        if self.reason:
            out["reason"] = self.reason
        return out


def _sturm_roots_left_of(poly: list[Fraction], w0: Fraction) -> int:
    """Number of distinct real roots of ``poly`` in ``(-inf, w0]``."""
    seq = [_poly.trim(poly), _poly.derivative(poly)]
    while seq[-1] and len(seq[-1]) > 1:
        _, rem = _poly.divmod_poly(seq[-2], seq[-1])
        if not rem:
            break
        seq.append(_poly.scale(rem, -1))

    def variations(values):
        signs = [v for v in values if v != 0]
        return sum(1 for a, b in zip(signs, signs[1:]) if (a > 0) != (b > 0))

    at_minus_inf = [q[-1] * (-1) ** (len(q) - 1) for q in seq if q]
    at_w0 = [_poly.evaluate(q, w0) for q in seq if q]
    return variations(at_minus_inf) - variations(at_w0)


def _monotone_threshold(poly: list) -> mpmath.mpf:
    """``w0`` with ``poly`` and ``poly'`` root-free on ``(-inf, w0]``.

    There ``|poly(w)|`` is monotone and grows as ``w -> -inf``.
    """
    if len(poly) <= 1:
        return mpmath.inf
    candidates = [poly, _poly.derivative(poly)]
    if all(is_exact(c) for c in poly):
        import numpy as np

        w0 = None
        for q in candidates:
            if len(q) <= 1:
                continue
            roots = np.roots([float(c) for c in reversed(q)])
            real = [r.real for r in roots if abs(r.imag) <= 1e-9 * (1 + abs(r))]
            if real:
                r = min(real)
                guess = Fraction(math.floor((r - 0.125 * (1 + abs(r))) * 64), 64)
                w0 = guess if w0 is None else min(w0, guess)
        if w0 is None:
            w0 = Fraction(0)
        while any(len(q) > 1 and _sturm_roots_left_of(q, w0) for q in candidates):
            w0 = 2 * w0 - 1 if w0 < 0 else -1 - w0
        return to_mpf(w0)
    # Cauchy bound: every complex root of q has |w| < 1 + max |a_i / a_n|
    bound = mpmath.mpf(0)
    for q in candidates:
        if len(q) > 1:
            lead = abs(to_mpf(q[-1]))
            bound = max(bound, 1 + max(abs(to_mpf(c)) / lead for c in q[:-1]))
    return -bound


def certify_zero_free(f, order: int = 10, t_max: float = 1.0) -> ZeroFreeCertificate:
    """Certify that zeros of ``f`` do not accumulate at ``t = 0``.

    With leading term ``t^mu P(log t)`` the remaining part is majorized by
    increasing functions ``t^delta |log t|^j`` (``delta > 0``), while
    ``|P(log t)|`` decreases in ``t`` once ``log t`` is left of all real roots
    of ``P`` and ``P'``. On that range the sign test at one point ``t_star``
    covers all of ``(0, t_star]``.
    """
    expansion, s_max, _ = _gap(f, order)
    low = expansion.series.below(s_max)
    if not low:
        residual = tail_certificate(expansion, order).bound(t_max)
        return ZeroFreeCertificate("zero_to_order", order, residual_bound=residual)
    if not expansion.rigorous:
        return ZeroFreeCertificate("inconclusive", order,
                                   reason="bounds rest on non-certified input data")
    mu0 = min(mu for (mu, _), _c in low.items())
    leading = [Fraction(0)] * (1 + max(j for (mu, j), _ in low.items() if mu == mu0))
    for (mu, j), c in low.items():
        if mu == mu0:
            leading[j] = c
    leading = tuple(leading)
    if any(v <= mu0 for (v, _), _ in expansion.remainder.items()):
        return ZeroFreeCertificate("inconclusive", order, mu0, leading,
                                   reason="truncation remainder is not o(t^mu)")
    w_cap = min(_monotone_threshold(list(leading)), mpmath.log(t_max))

    best = None
    for p in range(1, order + 1):
        cert = tail_certificate(expansion, p)
        if cert.s_p <= mu0:
            continue
        atoms = [(abs(to_mpf(c)), to_mpf(mu - mu0), j)
                 for (mu, j), c in expansion.series.below(cert.s_p).items() if mu != mu0]
        atoms.append((to_mpf(cert.C_total), to_mpf(cert.s_p - mu0), 0))
        atoms += [(to_mpf(c), to_mpf(v - mu0), j) for (v, j), c in expansion.remainder.items()]
        cap = w_cap
        for _, delta, j in atoms:
            if j:
                cap = min(cap, -j / delta)  # t^delta |log t|^j increases up to exp(-j/delta)

        def margin(w):
            lhs = abs(_poly.evaluate([to_mpf(c) for c in leading], w))
            rhs = sum((a * mpmath.exp(delta * w) * abs(w) ** j for a, delta, j in atoms),
                      mpmath.mpf(0))
            return lhs - rhs * (1 + mpmath.mpf(2) ** -40)

        with mpmath.workprec(DEFAULT_PRECISION):
            if cap == mpmath.inf:
                cap = mpmath.mpf(0)
            if margin(cap) > 0:
                w_star = cap
            else:
                lo, hi = cap - 2000, cap
                if margin(lo) <= 0:
                    continue
                for _ in range(200):
                    mid = (lo + hi) / 2
                    if margin(mid) > 0:
                        lo = mid
                    else:
                        hi = mid
                w_star = lo
            t_star = float(mpmath.exp(w_star) * (1 - mpmath.mpf(2) ** -50))
        if t_star > 0 and (best is None or t_star > best):
            best = t_star
    if best is None:
        return ZeroFreeCertificate("inconclusive", order, mu0, leading,
                                   reason="leading term never dominates the bound")
    return ZeroFreeCertificate("zero_free", order, mu0, leading, t_star=best)
