"""Discrete copulas on grids and their products.

A discrete copula on ``<n> x <m>`` (with ``<n> = {0, ..., n}``) is stored as
an ``(n+1) x (m+1)`` grid of Fractions.  Square copulas correspond one to one
with bistochastic matrices, and the copula product is the product of those
matrices.  :func:`product_via_markov` computes the same product as an
aggregate of a Markov combination on ``[n]^3``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .combine import star
from .core import Dist, aggregate, as_fraction, make_mapping
from .errors import InvalidCopula, NotBistochastic

__all__ = [
    "DiscreteCopula",
    "CopulaCheck",
    "validate_copula",
    "validate_generalized_copula",
    "is_bistochastic",
    "copula_from_bistochastic",
    "bistochastic_from_copula",
    "density_from_copula",
    "density_to_matrix",
    "product_copula",
    "product_via_markov",
    "independence_copula",
    "comonotone_copula",
    "permutation_matrix",
    "random_birkhoff",
    "grid_categories",
]

Matrix = tuple[tuple[Fraction, ...], ...]


def _matrix(rows) -> Matrix:
    return tuple(tuple(as_fraction(x) for x in row) for row in rows)


@dataclass(frozen=True)
class DiscreteCopula:
    """Grid function ``C(i, j)`` for ``0 <= i <= n`` and ``0 <= j <= m``."""

    n: int
    m: int
    values: Matrix

    def __post_init__(self):
        values = _matrix(self.values)
        if len(values) != self.n + 1 or any(len(r) != self.m + 1 for r in values):
            raise InvalidCopula(
                f"grid must have shape ({self.n + 1}, {self.m + 1})", condition="shape"
            )
        object.__setattr__(self, "values", values)

    def __call__(self, i: int, j: int) -> Fraction:
        return self.values[i][j]

    @property
    def square(self) -> bool:
        return self.n == self.m


@dataclass(frozen=True)
class CopulaCheck:
    """Outcome of a copula validation; falsy when a condition fails."""

    valid: bool
    condition: str | None = None
    where: tuple | None = None

    def __bool__(self):
        return self.valid


def _rectangle_mass(C: DiscreteCopula, i: int, j: int) -> Fraction:
    v = C.values
    return v[i - 1][j - 1] - v[i][j - 1] - v[i - 1][j] + v[i][j]


def _check(C: DiscreteCopula, row_margin, col_margin) -> CopulaCheck:
    v = C.values
    for i in range(C.n + 1):
        if v[i][0] != 0:
            return CopulaCheck(False, "C1", (i, 0))
    for j in range(C.m + 1):
        if v[0][j] != 0:
            return CopulaCheck(False, "C1", (0, j))
    for i in range(C.n + 1):
        if v[i][C.m] != row_margin[i]:
            return CopulaCheck(False, "C2", (i, C.m))
    for j in range(C.m + 1):
        if v[C.n][j] != col_margin[j]:
            return CopulaCheck(False, "C2", (C.n, j))
    for i in range(1, C.n + 1):
        for j in range(1, C.m + 1):
            if _rectangle_mass(C, i, j) < 0:
                return CopulaCheck(False, "C3", (i, j))
    return CopulaCheck(True)


def validate_copula(C: DiscreteCopula) -> CopulaCheck:
    """Check the boundary, margin and rectangle conditions exactly.

    Conditions are tested in order ``C1`` (zero on the lower boundary),
    ``C2`` (uniform margins) and ``C3`` (non-negative rectangle masses); the
    first failure is reported together with the offending grid point.
    """
    rows = [Fraction(i, C.n) for i in range(C.n + 1)]
    cols = [Fraction(j, C.m) for j in range(C.m + 1)]
    return _check(C, rows, cols)


def _cumulative(d: Sequence[Fraction]) -> list[Fraction]:
    return [Fraction(0)] + list(itertools.accumulate(d))


def validate_generalized_copula(C: DiscreteCopula, nu: Dist, mu: Dist) -> CopulaCheck:
    """Copula conditions with margins ``nu`` (rows) and ``mu`` (columns)."""
    if len(nu) != C.n or len(mu) != C.m:
        raise InvalidCopula("margin lengths do not match the grid", condition="shape")
    return _check(C, _cumulative(nu.entries), _cumulative(mu.entries))


def is_bistochastic(A) -> bool:
    A = _matrix(A)
    n = len(A)
    if any(len(r) != n for r in A):
        return False
    if any(x < 0 for r in A for x in r):
        return False
    return all(sum(r) == 1 for r in A) and all(sum(A[i][j] for i in range(n)) == 1 for j in range(n))


def copula_from_bistochastic(A) -> DiscreteCopula:
    """``C(i, j) = (1/n) * sum of a_kl over k <= i, l <= j``."""
    A = _matrix(A)
    if not is_bistochastic(A):
        raise NotBistochastic("matrix is not bistochastic")
    n = len(A)
    grid = [[Fraction(0)] * (n + 1) for _ in range(n + 1)]
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            grid[i][j] = grid[i - 1][j] + grid[i][j - 1] - grid[i - 1][j - 1] + A[i - 1][j - 1] / n
    return DiscreteCopula(n, n, grid)


def _rectangle_masses(C: DiscreteCopula) -> Matrix:
    return tuple(
        tuple(_rectangle_mass(C, i, j) for j in range(1, C.m + 1)) for i in range(1, C.n + 1)
    )


def bistochastic_from_copula(C: DiscreteCopula) -> Matrix:
    """The bistochastic matrix ``n * h`` of a square copula."""
    check = validate_copula(C)
    if not check or not C.square:
        raise InvalidCopula("not a valid square copula", condition=check.condition)
    return tuple(tuple(C.n * x for x in row) for row in _rectangle_masses(C))


def grid_categories(n: int) -> tuple[str, ...]:
    """Category labels ``"1", ..., "n"``."""
    return tuple(str(k) for k in range(1, n + 1))


def density_from_copula(C: DiscreteCopula) -> Dist:
    """The density ``h(k, l)`` of a copula as a distribution on ``[n] x [m]``.

    Categories are pairs ``("k", "l")`` with 1-based labels.
    """
    check = validate_copula(C)
    if not check:
        raise InvalidCopula(f"grid violates {check.condition} at {check.where}", condition=check.condition)
    rows, cols = grid_categories(C.n), grid_categories(C.m)
    masses = _rectangle_masses(C)
    index = [(a, b) for a in rows for b in cols]
    return Dist(index, [x for row in masses for x in row])


def density_to_matrix(d: Dist, n: int, m: int | None = None) -> Matrix:
    """Arrange a density on ``[n] x [m]`` as a matrix of Fractions."""
    m = n if m is None else m
    rows, cols = grid_categories(n), grid_categories(m)
    return tuple(tuple(d[(a, b)] for b in cols) for a in rows)


def _matmul(A: Matrix, B: Matrix) -> Matrix:
    m = len(B[0])
    out = []
    for row in A:
        acc = [Fraction(0)] * m
        for k, a in enumerate(row):
            if a:
                for j, b in enumerate(B[k]):
                    if b:
                        acc[j] += a * b
        out.append(tuple(acc))
    return tuple(out)


def product_copula(C1: DiscreteCopula, C2: DiscreteCopula) -> DiscreteCopula:
    """Copula of the product ``A B`` of the two associated bistochastic matrices."""
    if not (C1.square and C2.square) or C1.n != C2.n:
        raise InvalidCopula("copula products need square copulas of the same size", condition="shape")
    return copula_from_bistochastic(_matmul(bistochastic_from_copula(C1), bistochastic_from_copula(C2)))


def product_via_markov(alpha: Dist, beta: Dist) -> Dist:
    """Copula product of two densities on ``[n]^2`` through a Markov combination.

    ``alpha`` is aggregated to ``M = [n]`` along its second coordinate and
    ``beta`` along its first.  With uniform margins the two are consistent;
    their combination lives on ``[n]^3`` and, since every aggregate is ``1/n``,
    its aggregate onto the outer coordinates ``(i, j)`` is
    ``sum_k n alpha(i, k) beta(k, j)``.
    """
    cats = tuple(dict.fromkeys(a for a, _ in alpha.index))
    n = len(cats)
    if len(alpha) != n * n or len(beta) != n * n:
        raise InvalidCopula("densities must live on a square grid [n] x [n]", condition="shape")
    uniform = Fraction(1, n)
    for d in (alpha, beta):
        for side in (0, 1):
            marg = dict.fromkeys(cats, Fraction(0))
            for c, x in d.items():
                marg[c[side]] += x
            if any(x != uniform for x in marg.values()):
                raise InvalidCopula("densities must have uniform margins", condition="C2")
    p = make_mapping(alpha.index, {c: c[1] for c in alpha.index}, cats)
    q = make_mapping(beta.index, {c: c[0] for c in beta.index}, cats)
    combined = star(alpha, beta, p, q)
    outer = [(a, b) for a in cats for b in cats]
    to_outer = make_mapping(combined.index, {c: (c[0][0], c[1][1]) for c in combined.index}, outer)
    return aggregate(combined, to_outer)


def independence_copula(n: int, m: int | None = None) -> DiscreteCopula:
    m = n if m is None else m
    return DiscreteCopula(n, m, [[Fraction(i * j, n * m) for j in range(m + 1)] for i in range(n + 1)])


def comonotone_copula(n: int, m: int | None = None) -> DiscreteCopula:
    """``C(i, j) = min(i/n, j/m)``."""
    m = n if m is None else m
    return DiscreteCopula(
        n, m, [[min(Fraction(i, n), Fraction(j, m)) for j in range(m + 1)] for i in range(n + 1)]
    )


def permutation_matrix(perm: Sequence[int]) -> Matrix:
    """Row ``i`` has its one in column ``perm[i]`` (0-based)."""
    n = len(perm)
    if sorted(perm) != list(range(n)):
        raise ValueError(f"{perm!r} is not a permutation of 0..{n - 1}")
    return tuple(tuple(Fraction(int(perm[i] == j)) for j in range(n)) for i in range(n))


def random_birkhoff(n: int, rng: np.random.Generator, terms: int = 4, max_weight: int = 9) -> Matrix:
    """Random exactly bistochastic matrix: a rational convex combination of permutations."""
    weights = rng.integers(1, max_weight + 1, size=terms)
    total = int(weights.sum())
    out = [[Fraction(0)] * n for _ in range(n)]
    for w in weights:
        perm = rng.permutation(n)
        for i in range(n):
            out[i][int(perm[i])] += Fraction(int(w), total)
    return _matrix(out)
