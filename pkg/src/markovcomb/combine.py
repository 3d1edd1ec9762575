"""Markov combinations of concrete vectors.

For ``f`` on ``I``, ``g`` on ``J`` and mappings ``p: I -> M``, ``q: J -> M``
the left combination has entry ``f_i g_j / f_{M,k}`` at ``(i, j)`` with
``k = p(i) = q(j)``; the right combination divides by ``g_{M,k}`` instead.
When the two aggregates coincide both agree and define ``star``.
"""

from __future__ import annotations

import warnings
from fractions import Fraction
from typing import Literal, Sequence

from .core import (
    CategoryMapping,
    Dist,
    IndexedVector,
    ProductIndex,
    aggregate,
    make_mapping,
    mapping_product,
)
from .errors import IndexMismatch, NotConsistent, ZeroAggregate

__all__ = [
    "SubnormalizedWarning",
    "left_combine",
    "right_combine",
    "is_consistent",
    "star",
    "star_all",
    "projection_mapping",
    "project",
    "induced_mapping",
    "flatten_pairs",
    "swap_pairs",
]


class SubnormalizedWarning(UserWarning):
    """A permissive combination zeroed a block whose aggregate vanished."""


def _check_domain(v: IndexedVector, m: CategoryMapping, name: str):
    if set(v.index) != set(m.domain) or len(v.index) != len(m.domain):
        raise IndexMismatch(f"index of {name} does not match the domain of its mapping")


def _combine(f, g, p, q, divide_by: str, strict: bool, warn: bool = True) -> IndexedVector:
    _check_domain(f, p, "f")
    _check_domain(g, q, "g")
    prod = mapping_product(p, q)
    denom = aggregate(f, p) if divide_by == "f" else aggregate(g, q)
    fv, gv = f.as_dict(), g.as_dict()
    zero_blocks = []
    values = []
    zero = Fraction(0)
    for k, i, j in prod.triples:
        d = denom[k]
        if d == 0:
            if strict:
                raise ZeroAggregate(k)
            if not zero_blocks or zero_blocks[-1] != k:
                zero_blocks.append(k)
            values.append(zero)
        else:
            a, b = fv[i], gv[j]
            values.append(a * b / d if a and b else zero)
    out = IndexedVector(prod.pairs, values)
    if zero_blocks and warn:
        warnings.warn(
            f"zero aggregate on metacategories {zero_blocks!r}; result may be sub-normalized",
            SubnormalizedWarning,
            stacklevel=3,
        )
    if isinstance(f, Dist) and isinstance(g, Dist) and out.is_dist():
        return out.to_dist()
    return out


def left_combine(
    f: IndexedVector,
    g: IndexedVector,
    p: CategoryMapping,
    q: CategoryMapping,
    strict: bool = True,
    warn: bool = True,
) -> IndexedVector:
    """Left Markov combination ``f *_M g``, dividing by the aggregate of ``f``.

    With ``strict=False`` a block whose ``f``-aggregate is zero is set to zero
    and a :class:`SubnormalizedWarning` is issued instead of raising
    :class:`~markovcomb.errors.ZeroAggregate`.
    """
    return _combine(f, g, p, q, "f", strict, warn)


def right_combine(
    f: IndexedVector,
    g: IndexedVector,
    p: CategoryMapping,
    q: CategoryMapping,
    strict: bool = True,
    warn: bool = True,
) -> IndexedVector:
    """Right Markov combination, dividing by the aggregate of ``g``."""
    return _combine(f, g, p, q, "g", strict, warn)


def is_consistent(f: IndexedVector, g: IndexedVector, p: CategoryMapping, q: CategoryMapping) -> bool:
    _check_domain(f, p, "f")
    _check_domain(g, q, "g")
    if set(p.codomain) != set(q.codomain):
        return False
    fm, gm = aggregate(f, p), aggregate(g, q)
    return all(fm[k] == gm[k] for k in p.codomain)


def star(
    f: IndexedVector, g: IndexedVector, p: CategoryMapping, q: CategoryMapping, strict: bool = True
) -> IndexedVector:
    """Markov combination of two consistent vectors."""
    if not is_consistent(f, g, p, q):
        raise NotConsistent("vectors are not consistent with respect to the given mappings")
    return left_combine(f, g, p, q, strict=strict)


def projection_mapping(prod: ProductIndex, axis: Literal["I", "J"]) -> CategoryMapping:
    """The natural mapping ``I x_M J -> I`` (or ``-> J``)."""
    if axis == "I":
        return make_mapping(prod.pairs, {(i, j): i for i, j in prod.pairs}, prod.p.domain)
    if axis == "J":
        return make_mapping(prod.pairs, {(i, j): j for i, j in prod.pairs}, prod.q.domain)
    raise ValueError(f"axis must be 'I' or 'J', not {axis!r}")


def project(v: IndexedVector, prod: ProductIndex, axis: Literal["I", "J"]) -> IndexedVector:
    """Aggregate a vector over ``I x_M J`` along the projection to ``I`` or ``J``."""
    if set(v.index) != set(prod.pairs):
        raise IndexMismatch("vector is not indexed by the given mapping product")
    return aggregate(v.reindex(prod.pairs), projection_mapping(prod, axis))


def induced_mapping(
    prod: ProductIndex, through: Literal["I", "J"], nxt: CategoryMapping
) -> CategoryMapping:
    """The mapping ``(i, j) -> nxt(i)`` (or ``nxt(j)``) on the mapping product.

    This is what makes iterated combinations such as ``(f * g) * h`` well
    defined: the product ``I x_M J`` reaches a new metacategory set by passing
    through one of its factors.
    """
    side = prod.p if through == "I" else prod.q if through == "J" else None
    if side is None:
        raise ValueError(f"through must be 'I' or 'J', not {through!r}")
    if set(nxt.domain) != set(side.domain):
        raise IndexMismatch(f"domain of the next mapping is not {through}")
    pos = 0 if through == "I" else 1
    return make_mapping(prod.pairs, {c: nxt(c[pos]) for c in prod.pairs}, nxt.codomain)


def swap_pairs(v: IndexedVector) -> IndexedVector:
    """Transport a vector over pairs ``(i, j)`` to pairs ``(j, i)``."""
    return v.relabel(lambda c: (c[1], c[0]))


def flatten_pairs(c) -> tuple:
    """Flatten nested pair categories ``((i, j), l) -> (i, j, l)``.

    Only tuples produced by combinations are expanded; string categories are
    leaves.
    """
    if isinstance(c, tuple):
        out = ()
        for part in c:
            out += flatten_pairs(part)
        return out
    return (c,)


def star_all(vectors: Sequence[IndexedVector], mappings: Sequence[CategoryMapping]) -> IndexedVector:
    """n-ary Markov combination of pairwise consistent vectors over a common ``M``.

    Computed as a left fold.  Categories of the result are flat tuples
    ``(i_1, ..., i_n)``.
    """
    if len(vectors) != len(mappings) or not vectors:
        raise ValueError("need one mapping per vector and at least one vector")
    acc, acc_map = vectors[0], mappings[0]
    acc = acc.relabel(lambda c: (c,))
    acc_map = make_mapping(acc.index, {(c,): acc_map(c) for c in mappings[0].domain}, acc_map.codomain)
    for v, m in zip(vectors[1:], mappings[1:]):
        combined = star(acc, v, acc_map, m)
        prod = mapping_product(acc_map, m)
        nxt = induced_mapping(prod, "I", acc_map)
        acc = combined.relabel(lambda c: c[0] + (c[1],))
        acc_map = make_mapping(acc.index, {c[0] + (c[1],): nxt(c) for c in prod.pairs}, nxt.codomain)
    return acc
