"""Discrete copulas, bistochastic matrices and copula products."""

import itertools
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from markovcomb.copula import (
    DiscreteCopula,
    bistochastic_from_copula,
    comonotone_copula,
    copula_from_bistochastic,
    density_from_copula,
    density_to_matrix,
    independence_copula,
    is_bistochastic,
    permutation_matrix,
    product_copula,
    product_via_markov,
    random_birkhoff,
    validate_copula,
    validate_generalized_copula,
)
from markovcomb.core import Dist
from markovcomb.errors import InvalidCopula, NotBistochastic


def _cumulative_copula(A):
    """Brute-force copula of a bistochastic matrix by double sums."""
    n = len(A)
    return [[sum((A[k][l] for k in range(i) for l in range(j)), F(0)) / n for j in range(n + 1)] for i in range(n + 1)]


def _matprod(A, B):
    n = len(A)
    return tuple(tuple(sum((A[i][k] * B[k][j] for k in range(n)), F(0)) for j in range(n)) for i in range(n))


def test_standard_copulas_are_valid():
    assert validate_copula(independence_copula(3, 4))
    assert validate_copula(comonotone_copula(4))
    assert validate_copula(comonotone_copula(2, 3))


def test_zero_grid_fails_c2():
    check = validate_copula(DiscreteCopula(2, 2, [[0] * 3] * 3))
    assert not check and check.condition == "C2"


def test_nonzero_boundary_fails_c1():
    vals = [list(r) for r in independence_copula(2).values]
    vals[0][1] = F(1, 8)
    assert validate_copula(DiscreteCopula(2, 2, vals)).condition == "C1"


def test_negative_rectangle_fails_c3():
    # the countermonotone grid with its centre raised above the Frechet bound
    vals = [[0, 0, 0], [0, F(1, 2), F(1, 2)], [0, F(1, 2), 1]]
    assert validate_copula(DiscreteCopula(2, 2, vals))
    vals[1][1] = F(3, 4)
    check = validate_copula(DiscreteCopula(2, 2, vals))
    assert check.condition == "C3"


def test_shape_mismatch():
    with pytest.raises(InvalidCopula):
        DiscreteCopula(2, 2, [[0, 0], [0, 1]])


def test_copula_from_identity_permutation():
    C = copula_from_bistochastic(permutation_matrix([0, 1]))
    assert C.values == tuple(tuple(F(min(i, j), 2) for j in range(3)) for i in range(3))
    assert C == comonotone_copula(2)


def test_copula_from_uniform_matrix_is_independence():
    n = 4
    A = [[F(1, n)] * n for _ in range(n)]
    assert copula_from_bistochastic(A) == independence_copula(n)


def test_copula_from_non_bistochastic_raises():
    with pytest.raises(NotBistochastic):
        copula_from_bistochastic([[1, 0], [1, 0]])
    assert not is_bistochastic([[F(1, 2), F(1, 2)], [1, 0]])


def test_density_of_comonotone_and_independence():
    h = density_from_copula(comonotone_copula(3))
    assert density_to_matrix(h, 3) == tuple(tuple(F(int(i == j), 3) for j in range(3)) for i in range(3))
    u = density_from_copula(independence_copula(3))
    assert set(u.entries) == {F(1, 9)}


def test_density_marginals_are_uniform():
    rng = np.random.default_rng(1)
    for n in range(1, 7):
        A = random_birkhoff(n, rng)
        h = density_to_matrix(density_from_copula(copula_from_bistochastic(A)), n)
        assert all(sum(row) == F(1, n) for row in h)
        assert all(sum(h[i][j] for i in range(n)) == F(1, n) for j in range(n))


def test_round_trip_all_permutations_up_to_eight():
    for n in range(1, 9):
        perms = itertools.permutations(range(n)) if n <= 5 else itertools.islice(itertools.permutations(range(n)), 0, None, 97)
        for perm in perms:
            A = permutation_matrix(perm)
            C = copula_from_bistochastic(A)
            assert [list(r) for r in C.values] == _cumulative_copula(A)
            assert bistochastic_from_copula(C) == A
            assert density_to_matrix(density_from_copula(C), n) == tuple(tuple(x / n for x in r) for r in A)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 8), st.integers(0, 2**32 - 1))
def test_round_trip_random_bistochastic(n, seed):
    A = random_birkhoff(n, np.random.default_rng(seed))
    assert is_bistochastic(A)
    C = copula_from_bistochastic(A)
    assert validate_copula(C)
    assert bistochastic_from_copula(C) == A


def test_product_with_identity_and_independence():
    rng = np.random.default_rng(2)
    A = random_birkhoff(4, rng)
    C = copula_from_bistochastic(A)
    ident = comonotone_copula(4)
    assert product_copula(C, ident) == C == product_copula(ident, C)
    ind = independence_copula(4)
    assert product_copula(ind, C) == ind == product_copula(C, ind)


def test_product_of_permutations_composes():
    for s in itertools.permutations(range(4)):
        for t in [(1, 0, 3, 2), (3, 2, 1, 0), (2, 0, 3, 1)]:
            C = product_copula(copula_from_bistochastic(permutation_matrix(s)), copula_from_bistochastic(permutation_matrix(t)))
            composed = [t[s[i]] for i in range(4)]
            assert C == copula_from_bistochastic(permutation_matrix(composed))


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 5), st.integers(0, 2**32 - 1))
def test_product_is_associative(n, seed):
    rng = np.random.default_rng(seed)
    A, B, D = (copula_from_bistochastic(random_birkhoff(n, rng)) for _ in range(3))
    assert product_copula(product_copula(A, B), D) == product_copula(A, product_copula(B, D))


def test_product_size_mismatch():
    with pytest.raises(InvalidCopula):
        product_copula(independence_copula(2), independence_copula(3))
    with pytest.raises(InvalidCopula):
        product_copula(independence_copula(2, 3), independence_copula(2, 3))


def test_markov_product_uniform_and_identity():
    u = density_from_copula(independence_copula(2))
    assert product_via_markov(u, u) == u
    ident = density_from_copula(comonotone_copula(3))
    beta = density_from_copula(copula_from_bistochastic(random_birkhoff(3, np.random.default_rng(5))))
    assert product_via_markov(ident, beta) == beta


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_markov_product_matches_matrix_formula(n, seed):
    rng = np.random.default_rng(seed)
    alpha = density_from_copula(copula_from_bistochastic(random_birkhoff(n, rng)))
    beta = density_from_copula(copula_from_bistochastic(random_birkhoff(n, rng)))
    gamma = density_to_matrix(product_via_markov(alpha, beta), n)
    a, b = density_to_matrix(alpha, n), density_to_matrix(beta, n)
    assert gamma == tuple(tuple(n * x for x in row) for row in _matprod(a, b))


def test_markov_product_rejects_non_uniform_margins():
    idx = [(a, b) for a in "12" for b in "12"]
    skew = Dist(idx, ["1/2", "1/4", "0", "1/4"])
    with pytest.raises(InvalidCopula):
        product_via_markov(skew, skew)


def test_generalized_copula():
    uniform = Dist("123", [F(1, 3)] * 3)
    C = comonotone_copula(3)
    assert validate_generalized_copula(C, uniform, uniform) == validate_copula(C)
    nu, mu = Dist("ab", ["1/3", "2/3"]), Dist("xyz", ["1/2", "1/4", "1/4"])
    cn, cm = [F(0), F(1, 3), F(1)], [F(0), F(1, 2), F(3, 4), F(1)]
    prod = DiscreteCopula(2, 3, [[a * b for b in cm] for a in cn])
    assert validate_generalized_copula(prod, nu, mu)
    broken = DiscreteCopula(2, 3, [[a * b for b in cm[:-1] + [F(1, 2)]] for a in cn])
    assert validate_generalized_copula(broken, nu, mu).condition == "C2"
