"""Finite category sets, category mappings, aggregates and mapping products.

All concrete vectors carry exact rational entries (:class:`fractions.Fraction`).
Categories are hashable identifiers: strings, or tuples of categories for
categories built from products (a mapping product is indexed by pairs
``(i, j)``).  Category sets are plain tuples whose order is the insertion
order; every derived index inherits that order, which keeps results and
serializations deterministic.
"""

from __future__ import annotations

import numbers
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Hashable, Iterable, Mapping, Sequence, Tuple

from .errors import (
    CodomainMismatch,
    IndexMismatch,
    InvalidMapping,
    NotADistribution,
)

Category = Hashable
CategorySet = Tuple[Category, ...]

__all__ = [
    "Category",
    "CategoryMapping",
    "IndexedVector",
    "Dist",
    "ProductIndex",
    "as_fraction",
    "make_mapping",
    "identity_mapping",
    "constant_mapping",
    "aggregate",
    "fiber",
    "mapping_product",
    "compose_mappings",
]


def as_fraction(x) -> Fraction:
    """Convert an exact scalar (int, Fraction, ``"num/den"`` string) to Fraction.

    Floats are rejected: silently turning ``0.1`` into a 55-bit dyadic rational
    is almost never what is wanted.  Use :func:`markovcomb.parametric.snap`
    for deliberate float-to-rational rounding.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(x, numbers.Rational):
        return Fraction(int(x.numerator), int(x.denominator))
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"expected an exact rational, got {type(x).__name__}: {x!r}")


def _check_categories(cats: Iterable[Category], what: str) -> CategorySet:
    cats = tuple(cats)
    seen = set()
    for c in cats:
        if c is None or c == "" or c == ():
            raise InvalidMapping(f"empty category identifier in {what}")
        if c in seen:
            raise InvalidMapping(f"duplicate category {c!r} in {what}")
        seen.add(c)
    return cats


@dataclass(frozen=True)
class CategoryMapping:
    """A surjective map ``p: I -> M`` between ordered category sets.

    ``images[n]`` is the metacategory of ``domain[n]``.  Build instances with
    :func:`make_mapping`, which validates totality and surjectivity.
    """

    domain: CategorySet
    codomain: CategorySet
    images: CategorySet

    @cached_property
    def _lookup(self) -> dict:
        return dict(zip(self.domain, self.images))

    @cached_property
    def fibers(self) -> dict:
        out = {k: [] for k in self.codomain}
        for i, k in zip(self.domain, self.images):
            out[k].append(i)
        return {k: tuple(v) for k, v in out.items()}

    def __call__(self, i: Category) -> Category:
        try:
            return self._lookup[i]
        except KeyError:
            raise IndexMismatch(f"{i!r} is not in the domain of the mapping") from None

    def fiber(self, k: Category) -> CategorySet:
        return fiber(self, k)

    def as_dict(self) -> dict:
        return dict(self._lookup)

    def __len__(self):
        return len(self.domain)


def make_mapping(
    domain: Iterable[Category],
    assignment: Mapping[Category, Category] | Iterable[tuple[Category, Category]],
    codomain: Iterable[Category] | None = None,
) -> CategoryMapping:
    """Build a category mapping from an assignment ``i -> k``.

    Parameters
    ----------
    domain : iterable
        Ordered category set ``I``.
    assignment : mapping or iterable of pairs
        Metacategory of every element of ``I``; each element exactly once.
    codomain : iterable, optional
        Explicit order for ``M``.  Must list exactly the metacategories used.
        Defaults to order of first appearance along ``domain``.

    Examples
    --------
    >>> p = make_mapping("abc", {"a": "1", "b": "2", "c": "2"})
    >>> p.fiber("2")
    ('b', 'c')
    """
    domain = _check_categories(domain, "domain")
    pairs = list(assignment.items()) if isinstance(assignment, Mapping) else list(assignment)
    table: dict = {}
    for i, k in pairs:
        if i in table:
            raise InvalidMapping(f"category {i!r} assigned twice")
        table[i] = k
    dom = set(domain)
    extra = [i for i in table if i not in dom]
    if extra:
        raise InvalidMapping(f"assignment mentions categories outside the domain: {extra!r}")
    missing = [i for i in domain if i not in table]
    if missing:
        raise InvalidMapping(f"assignment misses domain categories: {missing!r}")
    images = tuple(table[i] for i in domain)
    used = tuple(dict.fromkeys(images))
    if codomain is None:
        codomain = used
    else:
        codomain = _check_categories(codomain, "codomain")
        if set(codomain) != set(used):
            unused = [k for k in codomain if k not in set(used)]
            raise InvalidMapping(
                f"mapping is not surjective onto the given codomain; unused: {unused!r}"
            )
    for k in codomain:
        if k is None or k == "" or k == ():
            raise InvalidMapping("empty metacategory identifier")
    return CategoryMapping(domain, tuple(codomain), images)


def identity_mapping(domain: Iterable[Category]) -> CategoryMapping:
    domain = tuple(domain)
    return make_mapping(domain, {i: i for i in domain})


def constant_mapping(domain: Iterable[Category], k: Category = "*") -> CategoryMapping:
    domain = tuple(domain)
    return make_mapping(domain, {i: k for i in domain})


def fiber(p: CategoryMapping, k: Category) -> CategorySet:
    """The aggregate category ``I_k = {i | p(i) = k}``."""
    try:
        return p.fibers[k]
    except KeyError:
        raise IndexMismatch(f"{k!r} is not a metacategory of the mapping") from None


class IndexedVector:
    """An exact rational vector indexed by an ordered category set."""

    __slots__ = ("index", "entries", "_pos")

    def __init__(self, index: Iterable[Category], entries: Iterable):
        index = _check_categories(index, "vector index")
        entries = tuple(as_fraction(x) for x in entries)
        if len(index) != len(entries):
            raise IndexMismatch(
                f"index has {len(index)} categories but {len(entries)} entries were given"
            )
        object.__setattr__(self, "index", index)
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "_pos", None)
        self._validate()

    def _validate(self):
        pass

    def __setattr__(self, name, value):
        raise AttributeError(f"{type(self).__name__} is immutable")

    @classmethod
    def from_dict(cls, values: Mapping[Category, object], index: Sequence[Category] | None = None):
        if index is None:
            index = list(values)
        return cls(index, [values[c] for c in index])

    def _positions(self) -> dict:
        if self._pos is None:
            object.__setattr__(self, "_pos", {c: n for n, c in enumerate(self.index)})
        return self._pos

    def __getitem__(self, c: Category) -> Fraction:
        try:
            return self.entries[self._positions()[c]]
        except KeyError:
            raise IndexMismatch(f"{c!r} is not in the index") from None

    def __contains__(self, c):
        return c in self._positions()

    def __len__(self):
        return len(self.index)

    def __iter__(self):
        return iter(self.index)

    def items(self):
        return zip(self.index, self.entries)

    def as_dict(self) -> dict:
        return dict(zip(self.index, self.entries))

    def total(self) -> Fraction:
        return sum((x for x in self.entries if x), Fraction(0))

    def is_dist(self) -> bool:
        return all(x >= 0 for x in self.entries) and self.total() == 1

    def to_dist(self) -> "Dist":
        return Dist(self.index, self.entries)

    def reindex(self, index: Sequence[Category]) -> "IndexedVector":
        """Same vector, categories listed in a different order."""
        index = tuple(index)
        if set(index) != set(self.index) or len(index) != len(self.index):
            raise IndexMismatch("reindex requires a permutation of the same categories")
        return type(self)(index, [self[c] for c in index])

    def relabel(self, rename) -> "IndexedVector":
        """Apply ``rename`` (callable or mapping) to every category."""
        f = rename if callable(rename) else rename.__getitem__
        return type(self)([f(c) for c in self.index], self.entries)

    def scale(self, c) -> "IndexedVector":
        c = as_fraction(c)
        return IndexedVector(self.index, [c * x for x in self.entries])

    def __add__(self, other: "IndexedVector") -> "IndexedVector":
        if not isinstance(other, IndexedVector):
            return NotImplemented
        if other.index != self.index:
            raise IndexMismatch("cannot add vectors over different indexes")
        return IndexedVector(self.index, [a + b for a, b in zip(self.entries, other.entries)])

    def __eq__(self, other):
        if not isinstance(other, IndexedVector):
            return NotImplemented
        return self.index == other.index and self.entries == other.entries

    def __hash__(self):
        return hash((self.index, self.entries))

    def __repr__(self):
        body = ", ".join(f"{c!r}: {x}" for c, x in self.items())
        return f"{type(self).__name__}({{{body}}})"


class Dist(IndexedVector):
    """A probability vector: non-negative exact entries summing to exactly 1."""

    __slots__ = ()

    def _validate(self):
        if any(x < 0 for x in self.entries):
            raise NotADistribution("distribution has a negative entry")
        s = self.total()
        if s != 1:
            raise NotADistribution(f"distribution sums to {s}, not 1")

    def scale(self, c):
        return IndexedVector(self.index, [as_fraction(c) * x for x in self.entries])


@dataclass(frozen=True)
class ProductIndex:
    """The mapping product ``I x_M J`` of two mappings with a shared codomain.

    ``triples`` lists ``(k, i, j)`` with ``p(i) = q(j) = k`` ordered by the
    position of ``k`` in ``M``, then ``i`` in ``I``, then ``j`` in ``J``.
    Vectors over the product are indexed by the pairs ``(i, j)``.
    """

    p: CategoryMapping
    q: CategoryMapping
    triples: Tuple[tuple, ...]

    @cached_property
    def pairs(self) -> CategorySet:
        return tuple((i, j) for _, i, j in self.triples)

    @cached_property
    def _meta(self) -> dict:
        return {(i, j): k for k, i, j in self.triples}

    @property
    def codomain(self) -> CategorySet:
        return self.p.codomain

    def metacategory(self, pair) -> Category:
        return self._meta[pair]

    def block(self, k: Category) -> tuple:
        return tuple((i, j) for kk, i, j in self.triples if kk == k)

    def __len__(self):
        return len(self.triples)

    def __iter__(self):
        return iter(self.triples)


def aggregate(v: IndexedVector, p: CategoryMapping) -> IndexedVector:
    """The aggregate ``v_M`` with ``v_{M,k} = sum of v_i over I_k``.

    Returns a :class:`Dist` when ``v`` is one.
    """
    if v.index != p.domain:
        if set(v.index) != set(p.domain) or len(v.index) != len(p.domain):
            raise IndexMismatch("vector index does not match the mapping domain")
    sums = {k: Fraction(0) for k in p.codomain}
    for i, x in v.items():
        if x:
            sums[p(i)] += x
    cls = Dist if isinstance(v, Dist) else IndexedVector
    return cls(p.codomain, [sums[k] for k in p.codomain])


def mapping_product(p: CategoryMapping, q: CategoryMapping) -> ProductIndex:
    """The fiber product ``{(i, j) | p(i) = q(j)}`` as an ordered triple list."""
    if set(p.codomain) != set(q.codomain):
        raise CodomainMismatch("mappings do not share the same codomain")
    triples = []
    for k in p.codomain:
        for i in p.fibers[k]:
            for j in q.fibers[k]:
                triples.append((k, i, j))
    return ProductIndex(p, q, tuple(triples))


def compose_mappings(p: CategoryMapping, r: CategoryMapping) -> CategoryMapping:
    """The composite ``I -> M -> M'``."""
    if set(p.codomain) != set(r.domain) or len(p.codomain) != len(r.domain):
        raise CodomainMismatch("codomain of the first mapping is not the domain of the second")
    return make_mapping(p.domain, {i: r(k) for i, k in zip(p.domain, p.images)}, r.codomain)
