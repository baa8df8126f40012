"""Rational Mellin functions and their time-domain counterparts.

Sign conventions, fixed once:

* A ``RationalMellin`` stores ``{(a, k): c}`` for ``sum c * (s + a)**(-k)``;
  the pole sits at ``s = -a``.
* A ``LogMonomialSeries`` stores ``{(mu, j): c}`` for
  ``sum c * t**mu * (log t)**j`` on ``(0, 1]``.
* The Mellin transform is ``M f(s) = int_0^1 t**(s-1) f(t) dt``, so
  ``t**a`` corresponds to ``1/(s + a)`` and the exponent ``mu`` equals the
  stored shift ``a``.
"""

from __future__ import annotations

import math
from collections import defaultdict
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence

import mpmath

from . import _poly
from ._numbers import DEFAULT_PRECISION, as_rational, coerce, is_zero, to_mpf

__all__ = [
    "RationalMellin",
    "LogMonomialSeries",
    "partial_fractions",
    "convolve",
    "inverse_mellin",
    "mellin_log_monomial",
]


def _canonical(items: Iterable[tuple[tuple, object]]) -> dict:
    acc: dict = defaultdict(lambda: Fraction(0))
    for key, c in items:
        acc[key] = acc[key] + coerce(c)
    return {k: v for k, v in sorted(acc.items()) if not is_zero(v)}


class RationalMellin:
    """Proper rational function of ``s`` in canonical partial-fraction form.

    Instances are immutable; arithmetic returns new canonical values.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[tuple, object] | Iterable = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        normalized = []
        for (a, k), c in items:
            k = int(k)
            if k < 1:
                raise ValueError(f"multiplicity must be >= 1, got {k}")
            normalized.append(((as_rational(a), k), c))
        self._terms = _canonical(normalized)
        self._hash = None

    @classmethod
    def zero(cls) -> "RationalMellin":
        return cls()

    @classmethod
    def from_poles(cls, shifts: Iterable) -> "RationalMellin":
        """``prod_j (s + v_j)**-1`` for a multiset of shifts."""
        counts: dict[Fraction, int] = defaultdict(int)
        for v in shifts:
            counts[as_rational(v)] += 1
        return partial_fractions([Fraction(1)], counts)

    @property
    def terms(self) -> Mapping[tuple[Fraction, int], object]:
        return dict(self._terms)

    def items(self) -> Iterator[tuple[tuple[Fraction, int], object]]:
        return iter(self._terms.items())

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_exact(self) -> bool:
        return all(isinstance(c, Fraction) for c in self._terms.values())

    def poles(self) -> dict[Fraction, int]:
        """Map shift ``a`` (pole at ``s = -a``) to its order."""
        out: dict[Fraction, int] = {}
        for (a, k) in self._terms:
            out[a] = max(out.get(a, 0), k)
        return dict(sorted(out.items()))

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)) and other == 0:
            return not self._terms
        if not isinstance(other, RationalMellin):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(tuple(self._terms.items()))
        return self._hash

    def __add__(self, other: "RationalMellin") -> "RationalMellin":
        if isinstance(other, (int, Fraction)) and other == 0:
            return self
        if not isinstance(other, RationalMellin):
            return NotImplemented
        return RationalMellin(list(self._terms.items()) + list(other._terms.items()))

    __radd__ = __add__

    def __neg__(self) -> "RationalMellin":
        return RationalMellin({key: -c for key, c in self._terms.items()})

    def __sub__(self, other: "RationalMellin") -> "RationalMellin":
        return self + (-other)

    def __mul__(self, scalar) -> "RationalMellin":
        if isinstance(scalar, RationalMellin):
            return NotImplemented
        c = coerce(scalar)
        return RationalMellin({key: v * c for key, v in self._terms.items()})

    __rmul__ = __mul__

    def __call__(self, s):
        """Evaluate at a numeric point (complex allowed) off the pole set."""
        if isinstance(s, (int, Fraction)) and self.is_exact():
            s = Fraction(s)
            return sum((c / (s + a) ** k for (a, k), c in self._terms.items()), Fraction(0))
        s = mpmath.mpmathify(s)
        return sum((to_mpf(c) / (s + to_mpf(a)) ** k for (a, k), c in self._terms.items()),
                   mpmath.mpf(0))

    def as_quotient(self) -> tuple[list, list]:
        """Recombine over the common denominator ``prod (s + a)**k_max``.

        Returns ascending coefficient lists ``(num, den)`` with ``den`` monic.
        """
        poles = self.poles()
        den = _poly.from_factors(poles)
        num: list = []
        for (a, k), c in self._terms.items():
            rest = dict(poles)
            rest[a] -= k
            num = _poly.add(num, _poly.scale(_poly.from_factors(rest), c))
        return num, den

    def __repr__(self) -> str:
        if not self._terms:
            return "RationalMellin(0)"
        parts = [f"{c}*(s+{a})^-{k}" for (a, k), c in self._terms.items()]
        return "RationalMellin(" + " + ".join(parts) + ")"


class LogMonomialSeries:
    """Finite sum of ``c * t**mu * (log t)**j`` on ``(0, 1]``."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[tuple, object] | Iterable = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        normalized = []
        for (mu, j), c in items:
            j = int(j)
            if j < 0:
                raise ValueError(f"log power must be >= 0, got {j}")
            normalized.append(((as_rational(mu), j), c))
        self._terms = _canonical(normalized)
        self._hash = None

    @classmethod
    def constant(cls, value) -> "LogMonomialSeries":
        return cls({(Fraction(0), 0): value})

    @property
    def terms(self) -> Mapping[tuple[Fraction, int], object]:
        return dict(self._terms)

    def items(self) -> Iterator[tuple[tuple[Fraction, int], object]]:
        return iter(self._terms.items())

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    @property
    def max_log_power(self) -> int:
        return max((j for (_, j) in self._terms), default=0)

    def exponents(self) -> list[Fraction]:
        return sorted({mu for (mu, _) in self._terms})

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)) and other == 0:
            return not self._terms
        if not isinstance(other, LogMonomialSeries):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(tuple(self._terms.items()))
        return self._hash

    def _lift(self, other) -> "LogMonomialSeries | None":
        if isinstance(other, LogMonomialSeries):
            return other
        if isinstance(other, (int, float, Fraction, mpmath.mpf)):
            return LogMonomialSeries.constant(other)
        return None

    def __add__(self, other) -> "LogMonomialSeries":
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return LogMonomialSeries(list(self._terms.items()) + list(other._terms.items()))

    __radd__ = __add__

    def __neg__(self) -> "LogMonomialSeries":
        return LogMonomialSeries({key: -c for key, c in self._terms.items()})

    def __sub__(self, other) -> "LogMonomialSeries":
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "LogMonomialSeries":
        return (-self) + other

    def __mul__(self, other) -> "LogMonomialSeries":
        if isinstance(other, LogMonomialSeries):
            # t^a log^i t * t^b log^j t = t^(a+b) log^(i+j) t
            prod = []
            for (a, i), c in self._terms.items():
                for (b, j), d in other._terms.items():
                    prod.append(((a + b, i + j), c * d))
            return LogMonomialSeries(prod)
        if isinstance(other, (int, float, Fraction, mpmath.mpf)):
            c = coerce(other)
            return LogMonomialSeries({key: v * c for key, v in self._terms.items()})
        return NotImplemented

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "LogMonomialSeries":
        out = LogMonomialSeries.constant(1)
        for _ in range(int(n)):
            out = out * self
        return out

    def below(self, bound) -> "LogMonomialSeries":
        """Terms with exponent strictly below ``bound``."""
        bound = as_rational(bound)
        return LogMonomialSeries({k: c for k, c in self._terms.items() if k[0] < bound})

    def above(self, bound) -> "LogMonomialSeries":
        bound = as_rational(bound)
        return LogMonomialSeries({k: c for k, c in self._terms.items() if k[0] > bound})

    def majorant(self) -> "LogMonomialSeries":
        """Same monomials with coefficients replaced by their absolute values."""
        return LogMonomialSeries({k: abs(c) for k, c in self._terms.items()})

    def evaluate(self, t, prec: int = DEFAULT_PRECISION, absolute_log: bool = False):
        """Value at ``t`` computed with ``prec`` bits; returned as ``mpf``.

        With ``absolute_log`` the monomials use ``|log t|``, which turns a
        majorant series into a pointwise bound.
        """
        with mpmath.workprec(prec):
            t = mpmath.mpf(t) if not isinstance(t, Fraction) else to_mpf(t)
            if t <= 0:
                raise ValueError("log-monomial series are defined for t > 0")
            lt = mpmath.log(t)
            if absolute_log:
                lt = abs(lt)
            acc = mpmath.mpf(0)
            for (mu, j), c in self._terms.items():
                acc += to_mpf(c) * mpmath.power(t, to_mpf(mu)) * lt ** j
            return +acc

    def __call__(self, t) -> float:
        return float(self.evaluate(t))

    def mellin(self) -> RationalMellin:
        out = RationalMellin()
        for (mu, j), c in self._terms.items():
            out = out + mellin_log_monomial(mu, j) * c
        return out

    def __repr__(self) -> str:
        if not self._terms:
            return "LogMonomialSeries(0)"
        parts = [f"{c}*t^{mu}*log(t)^{j}" for (mu, j), c in self._terms.items()]
        return "LogMonomialSeries(" + " + ".join(parts) + ")"


def partial_fractions(num: Sequence, factors: Mapping, den: Sequence | None = None) -> RationalMellin:
    """Split ``num / prod (s + a)**k`` into canonical simple fractions.

    ``num`` and ``den`` are ascending coefficient lists; ``factors`` maps the
    shift ``a`` to its multiplicity. When ``den`` is given it must equal the
    product of the supplied factors (checked by exact division).
    """
    num = _poly.trim([coerce(c) for c in num])
    factors = {as_rational(a): int(k) for a, k in factors.items() if int(k) != 0}
    if any(k < 0 for k in factors.values()):
        raise ValueError("multiplicities must be positive")
    expected = _poly.from_factors(factors)
    if den is not None:
        den = _poly.trim([coerce(c) for c in den])
        if not den:
            raise ValueError("denominator is zero")
        quot, rem = _poly.divmod_poly(den, expected)
        if rem or len(quot) != 1:
            raise ValueError("root multiset inconsistent with denominator")
        num = _poly.scale(num, 1 / quot[0])
    if len(num) >= len(expected):
        raise ValueError(
            f"improper quotient: deg num = {len(num) - 1} >= deg den = {len(expected) - 1}")
    terms = []
    for a, k in factors.items():
        others = {b: kb for b, kb in factors.items() if b != a}
        # Taylor data of num / others around s = -a, in u = s + a
        shifted_num = _poly.compose_shift(num, -a)
        shifted_den = _poly.compose_shift(_poly.from_factors(others), -a)
        coeffs = _poly.series_divide(shifted_num, shifted_den, k)
        for j, c in enumerate(coeffs):
            terms.append(((a, k - j), c))
    return RationalMellin(terms)


def inverse_mellin(f: RationalMellin) -> LogMonomialSeries:
    """Residues of ``t**-s f(s)``: ``(s+a)**-k -> t**a (-log t)**(k-1) / (k-1)!``."""
    terms = []
    for (a, k), c in f.items():
        j = k - 1
        terms.append(((a, j), c * Fraction((-1) ** j, math.factorial(j))))
    return LogMonomialSeries(terms)


def mellin_log_monomial(mu, j: int) -> RationalMellin:
    """Mellin transform of ``t**mu (log t)**j``: ``(-1)**j j! (s + mu)**-(j+1)``."""
    j = int(j)
    if j < 0:
        raise ValueError("log power must be non-negative")
    return RationalMellin({(as_rational(mu), j + 1): Fraction((-1) ** j * math.factorial(j))})


def convolve(f: RationalMellin, g: RationalMellin) -> RationalMellin:
    """Mellin-dual of the pointwise product on ``(0, 1]``.

    Simple poles combine as ``1/(s+a) * 1/(s+b) = 1/(s+a+b)``. At repeated
    poles the binomial factor of the log-power product is kept, so
    ``(s+a)**-2 * (s+b)**-2 = 2 (s+a+b)**-3``.
    """
    return (inverse_mellin(f) * inverse_mellin(g)).mellin()
