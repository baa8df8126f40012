"""Local saddle chart, meromorphic one-forms and edge data.

Near a saddle the first integral is ``H = x**lambda1 * y**lambda2`` and the
integration path is the level arc ``{H = t} ∩ [0, 1]**2`` traversed with
``x`` increasing. One-forms are truncated Laurent series

    sum c'_{m,n} x**(m-1) y**n dx + c''_{m,n} x**m y**(n-1) dy

with indices ``m, n > -M`` and coefficients under the envelope
``|c_{m,n}| <= C * 2**(-m-n)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence, Union

import numpy as np

from ._numbers import as_rational, coerce, is_zero, le, maximum, to_mpf
from .mellin import LogMonomialSeries

__all__ = [
    "ValidationError",
    "SaddleChart",
    "FormSeries",
    "EdgeSeries",
    "SaddlePiece",
    "EdgePiece",
    "PolycycleDescriptor",
    "validate_chart",
    "pullback_form",
    "fit_edge_series",
]

Index = tuple[int, int]


class ValidationError(ValueError):
    """Raised when user-supplied chart or form data violates a constraint."""


@dataclass(frozen=True)
class SaddleChart:
    lambda1: Fraction
    lambda2: Fraction
    pole_bound: int = 1
    scale: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "lambda1", as_rational(self.lambda1))
        object.__setattr__(self, "lambda2", as_rational(self.lambda2))
        object.__setattr__(self, "pole_bound", int(self.pole_bound))
        object.__setattr__(self, "scale", float(self.scale))
        if self.lambda1 <= 0 or self.lambda2 <= 0:
            raise ValidationError(
                f"exponents must be positive, got ({self.lambda1}, {self.lambda2})")
        if self.pole_bound < 0:
            raise ValidationError("pole bound M must be non-negative")
        if not self.scale > 0:
            raise ValidationError("scale must be positive")

    @property
    def mu_ratio(self) -> Fraction:
        return self.lambda1 / self.lambda2

    @property
    def min_index(self) -> int:
        """Smallest admissible m or n (indices satisfy m, n > -M)."""
        return 1 - self.pole_bound

    def model_level(self, t: float) -> float:
        """Convert a user level value to the normalized chart level ``t / scale``."""
        return float(t) / self.scale


def _coeff_table(raw) -> dict[Index, object]:
    if raw is None:
        return {}
    items = raw.items() if isinstance(raw, Mapping) else raw
    out: dict[Index, object] = {}
    for key, c in items:
        m, n = (int(key[0]), int(key[1]))
        value = coerce(c)
        value = out.get((m, n), Fraction(0)) + value
        out[(m, n)] = value
    return {k: v for k, v in sorted(out.items()) if not is_zero(v)}


@dataclass(frozen=True)
class FormSeries:
    """Truncated Laurent one-form with a geometric coefficient envelope.

    ``dx[(m, n)]`` multiplies ``x**(m-1) y**n dx`` and ``dy[(m, n)]``
    multiplies ``x**m y**(n-1) dy``. ``complete`` declares that the stored
    coefficients are the whole form (a polynomial form), so nothing beyond
    ``truncation`` is missing. When ``envelope`` is omitted it is estimated
    from the stored data and ``envelope_estimated`` is set.
    """

    dx: Mapping[Index, object] = field(default_factory=dict)
    dy: Mapping[Index, object] = field(default_factory=dict)
    envelope: object = None
    truncation: int | None = None
    complete: bool = True
    envelope_estimated: bool = False

    def __post_init__(self):
        dx = _coeff_table(self.dx)
        dy = _coeff_table(self.dy)
        object.__setattr__(self, "dx", dx)
        object.__setattr__(self, "dy", dy)
        keys = list(dx) + list(dy)
        top = max((m + n for m, n in keys), default=0)
        if self.truncation is None:
            object.__setattr__(self, "truncation", top)
        elif top > self.truncation:
            raise ValidationError(
                f"index with m+n = {top} exceeds truncation {self.truncation}")
        if self.envelope is None:
            est = maximum(abs(c) * Fraction(2) ** (m + n)
                          for table in (dx, dy) for (m, n), c in table.items())
            object.__setattr__(self, "envelope", est)
            object.__setattr__(self, "envelope_estimated", True)
        else:
            object.__setattr__(self, "envelope", coerce(self.envelope))
            if not le(0, self.envelope):
                raise ValidationError("envelope constant must be non-negative")
        self._check_envelope()

    def _check_envelope(self) -> None:
        C = self.envelope
        for table in (self.dx, self.dy):
            for (m, n), c in table.items():
                bound = C * Fraction(2) ** (-(m + n))
                if not le(abs(c), bound):
                    raise ValidationError(
                        f"envelope violated at {(m, n)}: |{c}| > {C}*2^{-(m + n)}")

    def is_zero(self) -> bool:
        return not self.dx and not self.dy

    def indices(self) -> list[Index]:
        return sorted(set(self.dx) | set(self.dy))


def validate_chart(chart: SaddleChart, forms: Sequence) -> tuple[SaddleChart, list[FormSeries]]:
    """Check raw chart/form data and return normalized values.

    ``forms`` may contain ``FormSeries`` or mappings with keys
    ``dx``, ``dy``, ``envelope``, ``truncation``, ``complete``.
    """
    if not isinstance(chart, SaddleChart):
        chart = SaddleChart(**chart)
    if chart.lambda1 <= 0 or chart.lambda2 <= 0:
        raise ValidationError("exponents must be positive")
    out = []
    for i, raw in enumerate(forms):
        form = raw if isinstance(raw, FormSeries) else FormSeries(**raw)
        for (m, n) in form.indices():
            if m < chart.min_index or n < chart.min_index:
                raise ValidationError(
                    f"form {i}: index {(m, n)} must exceed -M (M = {chart.pole_bound})")
        form._check_envelope()
        out.append(form)
    return chart, out


def pullback_form(chart: SaddleChart, form: FormSeries) -> FormSeries:
    """Restrict to the level curve and fold the ``dy`` part into ``dx``.

    On ``x**l1 y**l2 = t`` one has ``l1 dx/x + l2 dy/y = 0``, hence
    ``x**m y**(n-1) dy = -(l1/l2) x**(m-1) y**n dx`` with the same index.
    """
    if not form.dy:
        return form
    factor = -chart.mu_ratio
    dx = dict(form.dx)
    for key, c in form.dy.items():
        dx[key] = dx.get(key, Fraction(0)) + factor * c
    return FormSeries(
        dx=dx,
        envelope=form.envelope * (1 + chart.mu_ratio),
        truncation=form.truncation,
        complete=form.complete,
        envelope_estimated=form.envelope_estimated,
    )


@dataclass(frozen=True)
class EdgeSeries:
    """Puiseux-type series ``sum c_q t**q`` with ``q`` on the lattice ``(1/lambda) Z``.

    Edge pieces (near the separatrices) contribute functions meromorphic in
    ``t**(1/lambda)``. Fitted series carry ``certified=False`` and their
    least-squares residual.
    """

    branch_exponent: Fraction
    coefficients: Mapping[Fraction, object] = field(default_factory=dict)
    truncation: int | None = None
    certified: bool = True
    residual: float | None = None

    def __post_init__(self):
        lam = as_rational(self.branch_exponent)
        if lam <= 0:
            raise ValidationError("branch exponent must be positive")
        object.__setattr__(self, "branch_exponent", lam)
        coeffs = {}
        for q, c in sorted((as_rational(q), coerce(c)) for q, c in dict(self.coefficients).items()):
            if (q * lam).denominator != 1:
                raise ValidationError(f"exponent {q} is not on the lattice (1/{lam})Z")
            if not is_zero(c):
                coeffs[q] = c
        object.__setattr__(self, "coefficients", coeffs)
        if self.truncation is None:
            top = max((int(q * lam) for q in coeffs), default=0)
            object.__setattr__(self, "truncation", top)

    def as_series(self) -> LogMonomialSeries:
        return LogMonomialSeries({(q, 0): c for q, c in self.coefficients.items()})

    def __call__(self, t: float) -> float:
        return sum(float(to_mpf(c)) * float(t) ** float(q) for q, c in self.coefficients.items())


def fit_edge_series(ts: Sequence[float], values: Sequence[float], branch_exponent,
                    max_power: int, min_power: int = 0) -> EdgeSeries:
    """Least-squares fit of ``sum_{k=min..max} c_k t**(k/lambda)`` to samples."""
    lam = as_rational(branch_exponent)
    ts = np.asarray(ts, dtype=float)
    values = np.asarray(values, dtype=float)
    powers = [Fraction(k) / lam for k in range(min_power, max_power + 1)]
    basis = np.column_stack([ts ** float(q) for q in powers])
    coef, *_ = np.linalg.lstsq(basis, values, rcond=None)
    residual = float(np.max(np.abs(basis @ coef - values))) if len(values) else 0.0
    return EdgeSeries(
        branch_exponent=lam,
        coefficients={q: float(c) for q, c in zip(powers, coef)},
        truncation=max_power,
        certified=False,
        residual=residual,
    )


@dataclass(frozen=True)
class SaddlePiece:
    chart: SaddleChart
    forms: tuple[FormSeries, ...] = ()


@dataclass(frozen=True)
class EdgePiece:
    edges: tuple[EdgeSeries, ...] = ()


Piece = Union[SaddlePiece, EdgePiece]


@dataclass(frozen=True)
class PolycycleDescriptor:
    """Cycle split into elementary pieces at interior cut parameters.

    The normalized path parameter ``u`` runs over ``[0, 1]``; piece ``j``
    covers ``[cuts[j-1], cuts[j]]`` with ``cuts`` strictly increasing inside
    ``(0, 1)``. Saddle and edge pieces alternate around the polycycle.
    """

    pieces: tuple[Piece, ...]
    cuts: tuple[float, ...] = ()
    darboux: str = ""

    def __post_init__(self):
        object.__setattr__(self, "pieces", tuple(self.pieces))
        object.__setattr__(self, "cuts", tuple(float(c) for c in self.cuts))
        if not self.pieces:
            raise ValidationError("a polycycle needs at least one piece")
        if len(self.cuts) != len(self.pieces) - 1:
            raise ValidationError("need exactly one cut between consecutive pieces")
        bounds = (0.0,) + self.cuts + (1.0,)
        if any(not a < b for a, b in zip(bounds, bounds[1:])):
            raise ValidationError("cut parameters must increase strictly inside (0, 1)")
        for a, b in zip(self.pieces, self.pieces[1:]):
            if type(a) is type(b):
                raise ValidationError("saddle and edge pieces must alternate")

    @property
    def piece_count(self) -> int:
        return len(self.pieces)
