"""Graded free Lie algebras, induced automorphisms and quasi-unipotence.

Elements of the free Lie algebra on ``x_1 .. x_n`` are handled inside the
free associative algebra as dictionaries ``{word: coefficient}``. The Hall
family used is the Lyndon basis with its standard bracketing: a Lyndon word
``w = uv`` with ``v`` its longest proper Lyndon suffix maps to
``[P(u), P(v)]``. Since ``P(w) = w + (lexicographically larger words)``,
coordinates of a Lie polynomial come out of a triangular elimination.

Basis order inside each degree is lexicographic in the word, so degree 3 on
two generators reads ``[x1,[x1,x2]], [[x1,x2],x2]``.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Sequence

import sympy

__all__ = [
    "GradedFreeLie",
    "GradedAutomorphism",
    "QuasiUnipotenceReport",
    "VarReport",
    "hall_basis",
    "extend_automorphism",
    "var_check",
    "is_quasiunipotent",
    "witt_dimension",
]

#: cap on n**K, the number of words the largest degree may touch
WORD_BUDGET = 1_000_000

Word = tuple[int, ...]
Poly = dict[Word, Fraction]

Z = sympy.Symbol("z")


def witt_dimension(n: int, k: int) -> int:
    """Necklace count ``(1/k) sum_{d | k} mobius(d) n**(k/d)``."""
    total = sum(sympy.mobius(d) * n ** (k // d) for d in sympy.divisors(k))
    return int(total) // k


def _lyndon_words(n: int, K: int) -> list[Word]:
    """Duval's generator for Lyndon words of length <= K over ``0 .. n-1``."""
    out = []
    w = [-1]
    while w:
        w[-1] += 1
        out.append(tuple(w))
        m = len(w)
        while len(w) < K:
            w.append(w[len(w) - m])
        while w and w[-1] == n - 1:
            w.pop()
    return out


def _is_lyndon(w: Word) -> bool:
    return all(w < w[i:] for i in range(1, len(w)))


def _standard_split(w: Word) -> tuple[Word, Word]:
    for i in range(1, len(w)):
        if _is_lyndon(w[i:]):
            return w[:i], w[i:]
    raise ValueError(f"{w} has no standard factorization")


def _add_into(acc: Poly, p: Poly, c=1) -> None:
    for w, a in p.items():
        v = acc.get(w, 0) + c * a
        if v:
            acc[w] = v
        else:
            acc.pop(w, None)


def _commutator(p: Poly, q: Poly) -> Poly:
    out: Poly = {}
    for u, a in p.items():
        for v, b in q.items():
            for w, c in ((u + v, a * b), (v + u, -a * b)):
                s = out.get(w, 0) + c
                if s:
                    out[w] = s
                else:
                    out.pop(w, None)
    return out


@dataclass
class GradedFreeLie:
    """Free Lie algebra on ``n`` generators truncated at degree ``K``.

    ``basis[k]`` lists the Lyndon words of length ``k``; ``labels[k]`` their
    bracket expressions.
    """

    n: int
    K: int
    basis: dict[int, list[Word]] = field(default_factory=dict)
    _expansion: dict[Word, Poly] = field(default_factory=dict, repr=False)
    _index: dict[Word, int] = field(default_factory=dict, repr=False)
    _structure: dict[tuple[Word, Word], dict[Word, Fraction]] = field(default_factory=dict, repr=False)

    def dims(self) -> list[int]:
        return [len(self.basis[k]) for k in range(1, self.K + 1)]

    def dim(self, k: int) -> int:
        return len(self.basis[k])

    def label(self, w: Word) -> str:
        if len(w) == 1:
            return f"x{w[0] + 1}"
        u, v = _standard_split(w)
        return f"[{self.label(u)},{self.label(v)}]"

    def labels(self, k: int) -> list[str]:
        return [self.label(w) for w in self.basis[k]]

    def expansion(self, w: Word) -> Poly:
        """Associative expansion of the basis element ``P(w)``."""
        return self._expansion[w]

    def element(self, k: int, coords: Sequence) -> Poly:
        """Lie polynomial with the given coordinates in degree ``k``."""
        out: Poly = {}
        for w, c in zip(self.basis[k], coords):
            if c:
                _add_into(out, self._expansion[w], Fraction(c))
        return out

    def coordinates(self, p: Poly) -> dict[Word, Fraction]:
        """Hall coordinates of a Lie polynomial (raises if ``p`` is not Lie)."""
        rest = dict(p)
        out: dict[Word, Fraction] = {}
        while rest:
            w = min(rest, key=lambda u: (len(u), u))
            if w not in self._index:
                raise ValueError(f"not a Lie polynomial: leading word {w} is not Lyndon")
            c = rest[w]
            out[w] = c
            _add_into(rest, self._expansion[w], -c)
        return out

    def vector(self, k: int, p: Poly) -> list[Fraction]:
        coords = self.coordinates(p)
        if any(len(w) != k for w in coords):
            raise ValueError(f"element is not homogeneous of degree {k}")
        return [Fraction(coords.get(w, 0)) for w in self.basis[k]]

    def bracket(self, p: Poly, q: Poly) -> Poly:
        return _commutator(p, q)

    def structure_constants(self, u: Word, v: Word) -> dict[Word, Fraction]:
        """``[P(u), P(v)]`` in Hall coordinates (degree ``len(u) + len(v) <= K``)."""
        key = (u, v)
        if key not in self._structure:
            if len(u) + len(v) > self.K:
                raise ValueError("bracket exceeds the truncation degree")
            self._structure[key] = self.coordinates(_commutator(self._expansion[u], self._expansion[v]))
        return self._structure[key]


def hall_basis(n: int, K: int) -> GradedFreeLie:
    """Lyndon-Hall basis of the free Lie algebra on ``n`` generators up to degree ``K``."""
    if n < 1 or K < 1:
        raise ValueError("need n >= 1 and K >= 1")
    if n ** K > WORD_BUDGET:
        raise MemoryError(f"resource budget exceeded: {n}**{K} words > {WORD_BUDGET}")
    alg = GradedFreeLie(n, K, {k: [] for k in range(1, K + 1)})
    for w in sorted(_lyndon_words(n, K), key=lambda u: (len(u), u)):
        alg.basis[len(w)].append(w)
        if len(w) == 1:
            alg._expansion[w] = {w: Fraction(1)}
        else:
            u, v = _standard_split(w)
            alg._expansion[w] = _commutator(alg._expansion[u], alg._expansion[v])
    for k, words in alg.basis.items():
        for i, w in enumerate(words):
            alg._index[w] = i
    return alg


def _as_matrix(A) -> sympy.Matrix:
    M = sympy.Matrix(A)
    return M.applyfunc(lambda e: sympy.Rational(str(e)) if isinstance(e, float) else sympy.nsimplify(e))


@dataclass
class GradedAutomorphism:
    """Automorphism induced on each ``gr^k`` by a degree-1 matrix.

    Column ``j`` of ``matrices[k]`` holds the coordinates of the image of
    the ``j``-th basis element of degree ``k``.
    """

    alg: GradedFreeLie
    A: sympy.Matrix
    matrices: dict[int, sympy.Matrix] = field(default_factory=dict)
    images: dict[Word, Poly] = field(default_factory=dict, repr=False)

    def __getitem__(self, k: int) -> sympy.Matrix:
        return self.matrices[k]

    def apply(self, p: Poly) -> Poly:
        """Image of an arbitrary Lie polynomial (letterwise substitution)."""
        out: Poly = {}
        for w, c in p.items():
            term: Poly = {(): Fraction(c)}
            for letter in w:
                term = {u + v: a * b for u, a in term.items() for v, b in self.images[(letter,)].items()}
            _add_into(out, term)
        return out

    def check_multiplicative(self) -> bool:
        """``A[u, v] = [Au, Av]`` for all Hall basis pairs within the truncation."""
        alg = self.alg
        for i in range(1, alg.K):
            for j in range(1, alg.K - i + 1):
                for u in alg.basis[i]:
                    for v in alg.basis[j]:
                        lhs = self.apply(_commutator(alg.expansion(u), alg.expansion(v)))
                        rhs = _commutator(self.images[u], self.images[v])
                        if lhs != rhs:
                            return False
        return True


def extend_automorphism(alg: GradedFreeLie, A) -> GradedAutomorphism:
    """Induced maps on ``gr^1 .. gr^K`` from a degree-1 matrix (column convention)."""
    M = _as_matrix(A)
    if M.shape != (alg.n, alg.n):
        raise ValueError(f"degree-1 matrix must be {alg.n}x{alg.n}, got {M.shape[0]}x{M.shape[1]}")
    if M.det() == 0:
        raise ValueError("singular degree-1 matrix does not define an automorphism")
    aut = GradedAutomorphism(alg, M)
    for i in range(alg.n):
        aut.images[(i,)] = {(r,): Fraction(str(M[r, i])) for r in range(alg.n) if M[r, i] != 0}
    for k in range(1, alg.K + 1):
        cols = []
        for w in alg.basis[k]:
            if k > 1:
                u, v = _standard_split(w)
                aut.images[w] = _commutator(aut.images[u], aut.images[v])
            cols.append(alg.vector(k, aut.images[w]))
        dim = len(alg.basis[k])
        aut.matrices[k] = sympy.Matrix(dim, dim, lambda r, c: sympy.Rational(cols[c][r].numerator,
                                                                             cols[c][r].denominator))
    return aut


@dataclass(frozen=True)
class QuasiUnipotenceReport:
    quasi_unipotent: bool
    charpoly: sympy.Expr
    cyclotomic: dict[int, int]
    period: int | None = None
    exponent: int | None = None
    witness: sympy.Expr | None = None

    @property
    def annihilator(self) -> sympy.Expr | None:
        if not self.quasi_unipotent:
            return None
        return (Z ** self.period - 1) ** self.exponent

    def annihilator_str(self) -> str:
        if not self.quasi_unipotent:
            return ""
        base = "z-1" if self.period == 1 else f"z^{self.period}-1"
        if self.exponent == 0:
            return "1"
        return base if self.exponent == 1 else f"({base})^{self.exponent}"

    def __bool__(self) -> bool:
        return self.quasi_unipotent


def is_quasiunipotent(Mat) -> QuasiUnipotenceReport:
    """Decide whether every eigenvalue is a root of unity, exactly.

    The characteristic polynomial is divided by ``Phi_d`` for every ``d``
    with ``phi(d) <= deg``; such ``d`` satisfy ``d <= 2 deg**2``. On success
    the smallest ``e`` with ``(A**m - I)**e = 0`` is found, ``m`` being the
    lcm of the cyclotomic orders.
    """
    M = _as_matrix(Mat)
    if M.rows != M.cols:
        raise ValueError("matrix must be square")
    size = M.rows
    char = sympy.Poly(M.charpoly(Z).as_expr(), Z)
    rest = char
    found: dict[int, int] = {}
    for d in range(1, 2 * size * size + 3):
        if sympy.totient(d) > rest.degree():
            continue
        phi = sympy.Poly(sympy.cyclotomic_poly(d, Z), Z)
        while rest.degree() >= phi.degree():
            q, r = sympy.div(rest, phi)
            if not r.is_zero:
                break
            rest = q
            found[d] = found.get(d, 0) + 1
        if rest.degree() == 0:
            break
    if rest.degree() > 0:
        factors = sympy.factor_list(rest.as_expr(), Z)[1]
        witness = min((f for f, _ in factors), key=lambda f: (sympy.degree(f, Z), sympy.srepr(f)))
        return QuasiUnipotenceReport(False, char.as_expr(), found, witness=witness)
    period = reduce(math.lcm, found, 1)
    exponent = 0
    if size:
        step = M ** period - sympy.eye(size)
        power = sympy.eye(size)
        while not power.is_zero_matrix:
            power = power * step
            exponent += 1
            if exponent > size:
                raise AssertionError("annihilator search exceeded the matrix size")
    return QuasiUnipotenceReport(True, char.as_expr(), found, period, exponent)


@dataclass
class VarReport:
    ok: bool
    message: str = ""
    identity_checks: int = 0
    identity_holds: bool = False
    nilpotency: dict[int, int] = field(default_factory=dict)


def var_check(alg: GradedFreeLie, A, p: int, q: int, K: int | None = None,
              trials: int = 10, seed: int = 0) -> VarReport:
    """Check ``Var = A**p - id``: the bracket identity and nilpotency per degree.

    ``Var[x, y] = [Var x, Var y] + [Var x, y] + [x, Var y]`` is tested on
    ``trials`` random pairs of degree-1 elements; the nilpotency order of Var
    on ``gr^k`` is recorded for ``k <= K``.
    """
    K = alg.K if K is None else K
    if K > alg.K:
        raise ValueError(f"K = {K} exceeds the algebra truncation {alg.K}")
    M = _as_matrix(A)
    var1 = M ** p - sympy.eye(alg.n)
    if not (var1 ** q).is_zero_matrix:
        return VarReport(False, "degree-1 not quasi-unipotent for given (p,q)")
    aut = extend_automorphism(alg, M)
    rng = random.Random(seed)

    def var(x: Poly) -> Poly:
        y = x
        for _ in range(p):
            y = aut.apply(y)
        out = dict(y)
        _add_into(out, x, -1)
        return out

    holds = True
    checks = 0
    if K >= 2:
        for _ in range(trials):
            x = alg.element(1, [rng.randint(-5, 5) for _ in range(alg.n)])
            y = alg.element(1, [rng.randint(-5, 5) for _ in range(alg.n)])
            vx, vy = var(x), var(y)
            rhs: Poly = {}
            for a, b in ((vx, vy), (vx, y), (x, vy)):
                _add_into(rhs, _commutator(a, b))
            holds &= var(_commutator(x, y)) == rhs
            checks += 1
    nilpotency = {}
    for k in range(1, K + 1):
        dim = alg.dim(k)
        if dim == 0:
            nilpotency[k] = 0
            continue
        V = aut[k] ** p - sympy.eye(dim)
        power, order = sympy.eye(dim), 0
        while not power.is_zero_matrix and order <= dim:
            power = power * V
            order += 1
        nilpotency[k] = order if power.is_zero_matrix else -1
    nilpotent = all(v >= 0 for v in nilpotency.values())
    ok = holds and nilpotent
    message = "" if ok else ("Var identity failed" if not holds else "Var not nilpotent on some degree")
    return VarReport(ok, message, checks, holds, nilpotency)
