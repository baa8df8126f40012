"""Brute-force iterated path integrals by nested adaptive quadrature.

This module shares no code with the symbolic path: forms are evaluated as
plain numpy callables along explicit parameterizations, and

    int_{u_1 <= ... <= u_l} g_1(u_1) ... g_l(u_l) du

is computed through the recursion ``F_{l+1} = 1``,
``F_k(u) = int_u^end g_k F_{k+1}``. Every level lives on the same set of
Chebyshev-Lobatto panels, so a level costs one matrix product per panel.
Panels are bisected until the Chebyshev coefficients of every level's
integrand decay below the tolerance; the reported error is the change
under one further uniform bisection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial import chebyshev as cheb

__all__ = [
    "QuadratureError",
    "PathPiece",
    "ParamPath",
    "OneForm",
    "saddle_path",
    "line_path",
    "iterated_quadrature",
    "abelian_integral",
]

NODES = 24


class QuadratureError(RuntimeError):
    def __init__(self, message: str, estimate: float):
        super().__init__(f"{message} (achieved error estimate {estimate:.3e})")
        self.estimate = estimate


@dataclass(frozen=True)
class PathPiece:
    """Curve ``u -> (x(u), y(u))`` on ``[start, stop]`` with its velocity."""

    start: float
    stop: float
    point: Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]]
    velocity: Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]]
    label: str = ""

    def restrict(self, start: float, stop: float) -> "PathPiece":
        return PathPiece(start, stop, self.point, self.velocity, self.label)

    def endpoints(self) -> tuple[tuple[float, float], tuple[float, float]]:
        xs, ys = self.point(np.array([self.start, self.stop], dtype=float))
        return (float(xs[0]), float(ys[0])), (float(xs[1]), float(ys[1]))


@dataclass(frozen=True)
class ParamPath:
    pieces: tuple[PathPiece, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "pieces", tuple(self.pieces))

    def __add__(self, other: "ParamPath") -> "ParamPath":
        return ParamPath(self.pieces + other.pieces)

    def __len__(self) -> int:
        return len(self.pieces)

    def piece(self, index: int) -> "ParamPath":
        return ParamPath((self.pieces[index],))

    def split(self, index: int, u: float) -> "ParamPath":
        """Cut piece ``index`` at parameter ``u`` into two consecutive pieces."""
        p = self.pieces[index]
        if not p.start < u < p.stop:
            raise ValueError("cut parameter must lie strictly inside the piece")
        new = (p.restrict(p.start, u), p.restrict(u, p.stop))
        return ParamPath(self.pieces[:index] + new + self.pieces[index + 1:])

    def endpoints(self):
        return self.pieces[0].endpoints()[0], self.pieces[-1].endpoints()[1]


class OneForm:
    """``P(x, y) dx + Q(x, y) dy`` with vectorized coefficient callables."""

    def __init__(self, P: Callable | None = None, Q: Callable | None = None):
        self.P = P
        self.Q = Q

    def __call__(self, x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        zero = np.zeros_like(x)
        p = self.P(x, y) if self.P is not None else zero
        q = self.Q(x, y) if self.Q is not None else zero
        return np.broadcast_to(p, x.shape), np.broadcast_to(q, x.shape)

    def __add__(self, other: "OneForm") -> "OneForm":
        return OneForm(lambda x, y: self(x, y)[0] + other(x, y)[0],
                       lambda x, y: self(x, y)[1] + other(x, y)[1])

    def __rmul__(self, c: float) -> "OneForm":
        return OneForm(lambda x, y: c * self(x, y)[0], lambda x, y: c * self(x, y)[1])

    def pullback(self, piece: PathPiece, u: np.ndarray) -> np.ndarray:
        x, y = piece.point(u)
        dx, dy = piece.velocity(u)
        p, q = self(x, y)
        return p * dx + q * dy

    @classmethod
    def monomial_dx(cls, m: int, n: int, c: float = 1.0) -> "OneForm":
        """``c x**(m-1) y**n dx``."""
        return cls(P=lambda x, y: c * x ** float(m - 1) * y ** float(n))

    @classmethod
    def monomial_dy(cls, m: int, n: int, c: float = 1.0) -> "OneForm":
        """``c x**m y**(n-1) dy``."""
        return cls(Q=lambda x, y: c * x ** float(m) * y ** float(n - 1))

    @classmethod
    def from_tables(cls, dx: dict, dy: dict | None = None) -> "OneForm":
        """Sum of monomials from ``{(m, n): coefficient}`` tables."""
        dx_items = [(m, n, float(c)) for (m, n), c in dict(dx).items()]
        dy_items = [(m, n, float(c)) for (m, n), c in dict(dy or {}).items()]

        def P(x, y):
            out = np.zeros_like(x)
            for m, n, c in dx_items:
                out = out + c * x ** float(m - 1) * y ** float(n)
            return out

        def Q(x, y):
            out = np.zeros_like(x)
            for m, n, c in dy_items:
                out = out + c * x ** float(m) * y ** float(n - 1)
            return out

        return cls(P, Q)


def saddle_path(lambda1: float, lambda2: float, t: float) -> ParamPath:
    """Arc of ``x**lambda1 y**lambda2 = t`` in the unit square, x increasing.

    Parameterized by ``w = log x`` over ``[log(t)/lambda1, 0]``, which turns
    monomials into exponentials in ``w``.
    """
    lambda1, lambda2, t = float(lambda1), float(lambda2), float(t)
    if not 0.0 < t <= 1.0:
        raise ValueError(f"level t must lie in (0, 1], got {t}")
    mu = lambda1 / lambda2
    base = t ** (1.0 / lambda2)

    def point(w):
        w = np.asarray(w, dtype=float)
        return np.exp(w), base * np.exp(-mu * w)

    def velocity(w):
        x, y = point(w)
        return x, -mu * y

    start = math.log(t) / lambda1
    return ParamPath((PathPiece(start, 0.0, point, velocity, "saddle"),))


def line_path(p0: Sequence[float], p1: Sequence[float]) -> ParamPath:
    x0, y0 = map(float, p0)
    x1, y1 = map(float, p1)

    def point(u):
        u = np.asarray(u, dtype=float)
        return x0 + (x1 - x0) * u, y0 + (y1 - y0) * u

    def velocity(u):
        u = np.asarray(u, dtype=float)
        return np.full_like(u, x1 - x0), np.full_like(u, y1 - y0)

    return ParamPath((PathPiece(0.0, 1.0, point, velocity, "line"),))


@lru_cache(maxsize=8)
def _panel_operators(n: int):
    nodes = np.cos(np.pi * np.arange(n) / (n - 1))  # 1 .. -1
    vander = cheb.chebvander(nodes, n - 1)
    to_coeffs = np.linalg.inv(vander)
    integ = np.zeros((n + 1, n))
    for j in range(n):
        e = np.zeros(n)
        e[j] = 1.0
        integ[:, j] = cheb.chebint(e, lbnd=1.0)
    # (Q f)_i = int_{x_i}^{1} f on the reference panel
    Q = -cheb.chebvander(nodes, n) @ integ @ to_coeffs
    return nodes, to_coeffs, Q


def _sweep(forms, pieces, partitions, n, tol):
    """One pass over a fixed partition; returns (value, scale, unresolved panels)."""
    nodes, to_coeffs, Q = _panel_operators(n)
    grids = []
    for piece, panels in zip(pieces, partitions):
        per_panel = []
        for a, b in panels:
            u = a + (b - a) * (nodes + 1.0) / 2.0
            per_panel.append((u, (b - a) / 2.0, [f.pullback(piece, u) for f in forms]))
        grids.append(per_panel)

    unresolved = set()
    scale = 0.0
    upper = [[np.ones(n) for _ in panels] for panels in partitions]
    for k in range(len(forms) - 1, -1, -1):
        carry = 0.0
        current = [[None] * len(panels) for panels in partitions]
        for pi in range(len(pieces) - 1, -1, -1):
            for qi in range(len(partitions[pi]) - 1, -1, -1):
                _, half, gs = grids[pi][qi]
                f = gs[k] * upper[pi][qi]
                coeffs = to_coeffs @ f
                size = np.max(np.abs(coeffs))
                if np.max(np.abs(coeffs[-3:])) > tol * size + 1e-300 and size > 0:
                    unresolved.add((pi, qi))
                cum = half * (Q @ f) + carry
                current[pi][qi] = cum
                carry = cum[-1]
                if k == 0:
                    scale = max(scale, float(np.max(np.abs(cum))))
        upper = current
    return carry, scale, unresolved


def iterated_quadrature(forms: Sequence[OneForm], path: ParamPath, tol: float = 1e-12,
                        max_panels: int = 4096, full_output: bool = False):
    """Iterated integral ``int_path w_1 ... w_l`` (``w_1`` at the earliest point).

    ``tol`` is relative to the largest partial integral met along the path.
    With ``full_output`` returns ``(value, error_estimate)``.
    """
    if not forms:
        return (1.0, 0.0) if full_output else 1.0
    pieces = [p for p in path.pieces if p.stop != p.start]
    if not pieces:
        return (0.0, 0.0) if full_output else 0.0
    partitions = [list(np.linspace(p.start, p.stop, 3)) for p in pieces]
    partitions = [list(zip(b[:-1], b[1:])) for b in partitions]
    n = NODES
    coeff_tol = max(tol, 1e-15)
    while True:
        value, scale, unresolved = _sweep(forms, pieces, partitions, n, coeff_tol)
        if not unresolved:
            break
        count = sum(len(p) for p in partitions)
        if count + len(unresolved) > max_panels:
            raise QuadratureError("panel budget exhausted", float("inf"))
        partitions = [
            [half for qi, (a, b) in enumerate(panels)
             for half in (((a, (a + b) / 2), ((a + b) / 2, b)) if (pi, qi) in unresolved else ((a, b),))]
            for pi, panels in enumerate(partitions)
        ]
    finer = [[half for a, b in panels for half in ((a, (a + b) / 2), ((a + b) / 2, b))]
             for panels in partitions]
    fine_value, fine_scale, _ = _sweep(forms, pieces, finer, n, coeff_tol)
    error = abs(fine_value - value)
    if error > tol * max(fine_scale, abs(fine_value)) + 1e-300:
        if 2 * sum(len(p) for p in finer) > max_panels:
            raise QuadratureError("tolerance not reached", error)
        return iterated_quadrature(forms, path, tol / 10, max_panels, full_output)
    fine_value = float(fine_value)
    return (fine_value, float(error)) if full_output else fine_value


def abelian_integral(form: OneForm, t: float, cycle, tol: float = 1e-12) -> float:
    """First-order integral ``int_{gamma_t} w`` over a (possibly multi-piece) cycle.

    ``cycle`` is a ``ParamPath`` or a callable ``t -> ParamPath``.
    """
    path = cycle(t) if callable(cycle) else cycle
    return iterated_quadrature([form], path, tol=tol)
