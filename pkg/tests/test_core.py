"""Category mappings, indexed vectors, aggregates and mapping products."""

import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from markovcomb.core import (
    Dist,
    IndexedVector,
    aggregate,
    as_fraction,
    compose_mappings,
    constant_mapping,
    fiber,
    identity_mapping,
    make_mapping,
    mapping_product,
)
from markovcomb.errors import CodomainMismatch, IndexMismatch, InvalidMapping, NotADistribution

from helpers import CLUB, DIAMOND, HEART, SPADE, example_mappings, random_mapping, random_weights


def test_as_fraction_accepts_exact_and_rejects_floats():
    assert as_fraction("3/4") == F(3, 4)
    assert as_fraction(2) == F(2)
    with pytest.raises(TypeError):
        as_fraction(0.5)
    with pytest.raises(TypeError):
        as_fraction(True)


def test_identity_mapping_has_singleton_fibers():
    p = identity_mapping("abc")
    assert all(p.fibers[k] == (k,) for k in "abc")


def test_constant_mapping_has_one_fiber():
    p = constant_mapping("abc")
    assert p.codomain == ("*",)
    assert fiber(p, "*") == tuple("abc")


def test_fiber_of_example_mapping():
    p, _ = example_mappings()
    assert fiber(p, "2") == ("b", "c")
    with pytest.raises(IndexMismatch):
        fiber(p, "3")


@pytest.mark.parametrize(
    "domain, assignment, codomain",
    [
        ("ab", {"a": "1"}, None),
        ("ab", {"a": "1", "b": "1", "c": "2"}, None),
        ("ab", {"a": "1", "b": "1"}, ["1", "2"]),
        ("aa", {"a": "1"}, None),
        ("ab", [("a", "1"), ("a", "2"), ("b", "1")], None),
    ],
)
def test_invalid_mappings_are_rejected(domain, assignment, codomain):
    with pytest.raises(InvalidMapping):
        make_mapping(domain, assignment, codomain)


def test_aggregate_of_example_vector():
    p, _ = example_mappings()
    f = Dist("abc", ["3/4", "1/8", "1/8"])
    agg = aggregate(f, p)
    assert isinstance(agg, Dist)
    assert agg.entries == (F(3, 4), F(1, 4))


def test_aggregate_identity_and_marginal():
    f = Dist("abc", ["1/2", "1/3", "1/6"])
    assert aggregate(f, identity_mapping("abc")) == f
    cells = [(a, b) for a in "xy" for b in "uvw"]
    u = Dist(cells, [F(1, 6)] * 6)
    marg = aggregate(u, make_mapping(cells, {c: c[0] for c in cells}))
    assert marg.entries == (F(1, 2), F(1, 2))


def test_aggregate_index_mismatch():
    p, _ = example_mappings()
    with pytest.raises(IndexMismatch):
        aggregate(Dist("ab", ["1/2", "1/2"]), p)


def test_dist_validation():
    with pytest.raises(NotADistribution):
        Dist("ab", ["1/2", "1/3"])
    with pytest.raises(NotADistribution):
        Dist("ab", ["3/2", "-1/2"])
    with pytest.raises(IndexMismatch):
        IndexedVector("ab", [1])


def test_vector_operations():
    v = IndexedVector("ab", [1, 3])
    assert v.total() == 4
    assert v.scale(F(1, 4)).to_dist().entries == (F(1, 4), F(3, 4))
    assert (v + v).entries == (2, 6)
    assert v.scale(F(1, 2)).entries == (F(1, 2), F(3, 2))
    assert v.reindex("ba").entries == (3, 1)
    assert v.relabel(str.upper)["B"] == 3
    assert IndexedVector.from_dict({"a": 1, "b": 3}) == v


def test_example_mapping_product():
    p, q = example_mappings()
    prod = mapping_product(p, q)
    assert prod.triples == (
        ("1", "a", CLUB), ("1", "a", DIAMOND), ("1", "a", HEART), ("2", "b", SPADE), ("2", "c", SPADE),
    )
    assert prod.metacategory(("c", SPADE)) == "2"


def test_product_over_singleton_is_cartesian():
    prod = mapping_product(constant_mapping("ab"), constant_mapping("xyz"))
    assert prod.pairs == tuple((a, b) for a in "ab" for b in "xyz")


def test_product_of_identities_is_diagonal():
    prod = mapping_product(identity_mapping("abc"), identity_mapping("abc"))
    assert prod.pairs == (("a", "a"), ("b", "b"), ("c", "c"))


def test_product_codomain_mismatch():
    with pytest.raises(CodomainMismatch):
        mapping_product(constant_mapping("ab", "x"), constant_mapping("cd", "y"))


def test_compose_with_identity_and_constant():
    p, _ = example_mappings()
    assert compose_mappings(p, identity_mapping(p.codomain)).as_dict() == p.as_dict()
    c = compose_mappings(constant_mapping("abc"), identity_mapping("*"))
    assert set(c.images) == {"*"}
    with pytest.raises(CodomainMismatch):
        compose_mappings(p, identity_mapping("xy"))


@st.composite
def mapping_chain(draw):
    seed = draw(st.integers(0, 10**6))
    rng = random.Random(seed)
    n = draw(st.integers(1, 8))
    dom = [f"c{t}" for t in range(n)]
    p = random_mapping(rng, dom, rng.randint(1, n))
    r = random_mapping(rng, p.codomain, rng.randint(1, len(p.codomain)))
    u = IndexedVector(dom, [rng.randint(-9, 9) for _ in dom])
    v = IndexedVector(dom, [F(rng.randint(0, 9), rng.randint(1, 9)) for _ in dom])
    return p, r, u, v, F(rng.randint(-5, 5), rng.randint(1, 5))


@settings(max_examples=150, deadline=None)
@given(mapping_chain())
def test_tower_property(chain):
    p, r, u, _, _ = chain
    assert aggregate(aggregate(u, p), r) == aggregate(u, compose_mappings(p, r))


@settings(max_examples=150, deadline=None)
@given(mapping_chain())
def test_aggregate_is_linear_and_preserves_mass(chain):
    p, _, u, v, a = chain
    lhs = aggregate(u.scale(a) + v, p)
    rhs = aggregate(u, p).scale(a) + aggregate(v, p)
    assert lhs == rhs
    assert aggregate(u, p).total() == u.total()


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**6))
def test_product_cardinality(seed):
    rng = random.Random(seed)
    m = rng.randint(1, 4)
    p = random_mapping(rng, [f"i{t}" for t in range(rng.randint(m, 7))], m)
    q = random_mapping(rng, [f"j{t}" for t in range(rng.randint(m, 7))], m)
    prod = mapping_product(p, q)
    assert len(prod) == sum(len(p.fibers[k]) * len(q.fibers[k]) for k in p.codomain)
    assert set(prod.pairs) == {(i, j) for i in p.domain for j in q.domain if p(i) == q(j)}
    assert len(random_weights(rng, 3)) == 3
