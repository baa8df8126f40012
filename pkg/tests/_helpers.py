"""Shared generators for the test modules."""

import random

import sympy

Z = sympy.Symbol("z")


def companion(d: int) -> sympy.Matrix:
    coeffs = sympy.Poly(sympy.cyclotomic_poly(d, Z), Z).all_coeffs()[::-1]  # ascending, monic
    k = len(coeffs) - 1
    M = sympy.zeros(k, k)
    for i in range(1, k):
        M[i, i - 1] = 1
    for i in range(k):
        M[i, k - 1] = -coeffs[i]
    return M


def unimodular(n: int, rng: random.Random) -> sympy.Matrix:
    U = sympy.eye(n)
    for _ in range(3 * n):
        i, j = rng.sample(range(n), 2)
        E = sympy.eye(n)
        E[i, j] = rng.choice([-2, -1, 1, 2])
        U = U * E
    return U


def random_quasi_unipotent(n: int, rng: random.Random) -> sympy.Matrix:
    """Block diagonal cyclotomic companions and unipotent blocks, conjugated by a unimodular matrix."""
    blocks, size = [], 0
    while size < n:
        room = n - size
        options = [("phi", d) for d, deg in ((1, 1), (2, 1), (3, 2), (4, 2), (6, 2)) if deg <= room]
        if room >= 2:
            options.append(("jordan", 2))
        kind, d = rng.choice(options)
        block = companion(d) if kind == "phi" else sympy.Matrix([[1, 1], [0, 1]])
        blocks.append(block)
        size += block.rows
    B = sympy.diag(*blocks)
    U = unimodular(n, rng)
    return U * B * U.inv()
