"""Saturated models, lifts, pure mixtures, dimensions and polynomial models."""

import random
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from markovcomb.core import Dist, aggregate, constant_mapping, make_mapping, mapping_product
from markovcomb.parametric import (
    binomial,
    consistent_saturated_pair,
    evaluate,
    expfam_combination_dim,
    is_meta_consistent,
    jacobian_rank,
    lift_preimage,
    meta_star,
    model_lift,
    numeric_jacobian,
    piecewise_polynomial_model,
    polynomial_model,
    pure_mixture_coordinates,
    saturated,
    saturated_preimage,
    solve_consistency_exact,
)

from helpers import example_mappings, example_models, random_consistent_pair, random_dist, random_mapping

P_BLOCKS = make_mapping("0123", {"0": "0", "1": "0", "2": "1", "3": "1"})
Q_BLOCKS = make_mapping("0123", {"0": "0", "1": "1", "2": "1", "3": "1"})


def test_saturated_single_category_is_constant():
    m = saturated(["only"])
    assert m.dimension == 0
    assert evaluate(m, ()).entries == (1,)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**9))
def test_saturated_is_surjective(seed):
    rng = random.Random(seed)
    d = random_dist(rng, [f"c{t}" for t in range(rng.randint(1, 7))], zero_prob=0.3)
    assert evaluate(saturated(d.index), saturated_preimage(d)) == d


def test_binomial_sums_to_one():
    for n in range(6):
        for t in (F(0), F(1, 3), F(1)):
            assert evaluate(binomial(n), (t,)).total() == 1


def test_lift_over_singleton_is_saturated():
    h = saturated(["*"])
    f = model_lift(constant_mapping("abcd"), h)
    sat = saturated("abcd")
    for t in sat.box.sample(16):
        assert evaluate(f, t) == evaluate(sat, t)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**9))
def test_lift_reaches_every_distribution(seed):
    rng = random.Random(seed)
    p = random_mapping(rng, [f"i{t}" for t in range(rng.randint(1, 7))], rng.randint(1, 4))
    a = random_dist(rng, p.domain, zero_prob=0.2)
    h = saturated(p.codomain)
    f = model_lift(p, h)
    theta = lift_preimage(p, saturated_preimage(aggregate(a, p)), a)
    assert evaluate(f, theta) == a


def test_lift_aggregate_is_h():
    rng = random.Random(3)
    p = random_mapping(rng, [f"i{t}" for t in range(6)], 3)
    h = saturated(p.codomain)
    f = model_lift(p, h)
    for t in f.box.sample(100):
        assert aggregate(evaluate(f, t), p) == evaluate(h, t[: h.dimension])


def test_pure_mixture_example():
    f, g = consistent_saturated_pair(P_BLOCKS, Q_BLOCKS)
    report = is_meta_consistent(f, g, P_BLOCKS, Q_BLOCKS)
    assert report and report.worst_gap == 0
    c = meta_star(f, g, P_BLOCKS, Q_BLOCKS)
    assert len(c.index) == 8
    # theta = (h_1, lambda_01, lambda_13, mu_12, mu_13)
    h1, l01, l13, m12, m13 = F(1, 3), F(1, 4), F(2, 5), F(1, 6), F(1, 2)
    lam = {"0": 1 - l01, "1": l01, "2": 1 - l13, "3": l13}
    mu = {"0": F(1), "1": 1 - m12 - m13, "2": m12, "3": m13}
    h = {"0": 1 - h1, "1": h1}
    out = evaluate(c, (h1, l01, l13, m12, m13))
    for (i, j), v in out.items():
        assert v == lam[i] * mu[j] * h[P_BLOCKS(i)]


def test_pure_mixture_over_singleton_is_independence():
    p, q = constant_mapping("abc"), constant_mapping("xy")
    f, g = consistent_saturated_pair(p, q)
    c = meta_star(f, g, p, q)
    for t in c.box.sample(8):
        fd, gd = evaluate(f, t), evaluate(g, t)
        assert evaluate(c, t).as_dict() == {(a, b): fd[a] * gd[b] for a in "abc" for b in "xy"}


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10**9))
def test_pure_mixture_coordinates_invert(seed):
    a, b, p, q = random_consistent_pair(random.Random(seed), max_size=6)
    f, g = consistent_saturated_pair(p, q)
    theta = pure_mixture_coordinates(p, q, a, b)
    assert evaluate(f, theta) == a and evaluate(g, theta) == b


def test_expfam_dimensions():
    assert expfam_combination_dim(P_BLOCKS, Q_BLOCKS) == (5, 7)
    assert expfam_combination_dim(constant_mapping("abc"), constant_mapping("wxyz")) == (5, 11)


def test_jacobian_rank_matches_dimension_on_example():
    f, g = consistent_saturated_pair(P_BLOCKS, Q_BLOCKS)
    c = meta_star(f, g, P_BLOCKS, Q_BLOCKS)
    theta = c.box.sample(3)[1]
    assert jacobian_rank(c, theta) == expfam_combination_dim(P_BLOCKS, Q_BLOCKS)[0]


def test_numeric_jacobian_of_linear_model_is_exact():
    f, _, _ = example_models()
    jac = numeric_jacobian(f, (F(1, 8),))
    np.testing.assert_array_equal(jac, np.array([[3.0], [1.0], [-4.0]]))


def test_polynomial_model_formats():
    terms = [[{"coef": "1", "powers": [0]}, {"coef": "-1", "powers": [1]}], [["1", [1]]]]
    m = polynomial_model("ab", [0], [1], terms)
    assert evaluate(m, "1/3").entries == (F(2, 3), F(1, 3))
    with pytest.raises(ValueError):
        polynomial_model("ab", [0], [1], terms[:1])
    with pytest.raises(ValueError):
        polynomial_model("ab", [0], [1], [[["1", [0, 1]]], [["0", [0]]]])


def test_piecewise_model_switches_pieces():
    low = [[("1", [0])], [("0", [0])]]
    high = [[("0", [0])], [("1", [0])]]
    m = piecewise_polynomial_model("ab", [0], [1], [([0], ["1/2"], low), (["1/2"], [1], high)])
    assert evaluate(m, "1/4").entries == (1, 0)
    assert evaluate(m, "3/4").entries == (0, 1)
    assert evaluate(m, "1/2").entries == (1, 0)


def test_exact_solver():
    p, q = example_mappings()
    f, g, f2 = example_models()
    assert solve_consistency_exact(f2, g, p, q) == [(F(1, 7),)]
    assert solve_consistency_exact(f, g, p, q) is None
    free = polynomial_model("abc", [0, 0], [1, 1], [[("1", [1, 0])], [("1", [0, 1])], [("1", [0, 0]), ("-1", [1, 0]), ("-1", [0, 1])]])
    other = polynomial_model("♣♦♥♠", [0, 0], [1, 1], [[("1", [0, 1])], [("0", [0, 0])], [("0", [0, 0])], [("1", [0, 0]), ("-1", [0, 1])]])
    with pytest.raises(ValueError):
        solve_consistency_exact(free, other, p, q)
    assert len(mapping_product(p, q)) == 5
    assert isinstance(evaluate(free, (F(1, 4), F(1, 4))), Dist)
