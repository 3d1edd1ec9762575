"""Staged trees, their path models, decompositions and Markov combination.

A staged tree is a rooted tree whose edges carry labels.  The outgoing edges
of a vertex form a floret; two florets either carry the same label set (they
are in the same stage) or disjoint ones.  The model assigns to every
root-to-leaf path the product of its edge labels, where the labels of each
stage form a probability vector.

Paths are identified by their leaf vertex.  All orders (vertices, paths,
stages) follow a depth-first traversal that visits children in edge order.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Callable, Hashable, Mapping, Sequence

import numpy as np

from .core import CategoryMapping, Dist, as_fraction, make_mapping
from .errors import InvalidDecomposition, InvalidTree, NotMetaConsistent
from .parametric.model import ParamBox, ParametricModel

__all__ = [
    "Edge",
    "StagedTree",
    "StageCheck",
    "TreeDecomposition",
    "PathFactorization",
    "StagedCombination",
    "make_tree",
    "validate_staged",
    "tree_stages",
    "tree_model",
    "labels_from_theta",
    "path_probabilities",
    "random_labels",
    "decompose",
    "factorize",
    "staged_meta_consistent",
    "staged_combine",
    "joint_tree_models",
    "models_equal",
]

Label = Hashable


@dataclass(frozen=True)
class Edge:
    src: Hashable
    dst: Hashable
    label: Label


@dataclass(frozen=True, eq=False)
class StagedTree:
    """A rooted tree with labeled edges.

    Construction checks the tree structure (one root, one parent per
    non-root vertex, everything reachable, distinct labels inside each
    floret).  The stage condition is checked by :func:`validate_staged`.
    """

    vertices: tuple
    edges: tuple
    root: Hashable

    def __post_init__(self):
        vertices = tuple(self.vertices)
        edges = tuple(e if isinstance(e, Edge) else Edge(*e) for e in self.edges)
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "edges", edges)
        vs = set(vertices)
        if len(vs) != len(vertices):
            raise InvalidTree("duplicate vertex")
        if self.root not in vs:
            raise InvalidTree(f"root {self.root!r} is not a vertex")
        parents: dict = {}
        for e in edges:
            if e.src not in vs or e.dst not in vs:
                raise InvalidTree(f"edge {e.src!r}->{e.dst!r} uses an unknown vertex")
            if e.dst in parents:
                raise InvalidTree(f"vertex {e.dst!r} has more than one parent")
            parents[e.dst] = e.src
        roots = [v for v in vertices if v not in parents]
        if roots != [self.root]:
            raise InvalidTree(f"expected exactly one root {self.root!r}, found {roots!r}")
        if len(self._preorder) != len(vertices):
            raise InvalidTree("graph is not connected or contains a cycle")
        for v, out in self.florets.items():
            labels = [e.label for e in out]
            if len(set(labels)) != len(labels):
                raise InvalidTree(f"floret of {v!r} repeats a label")

    def __eq__(self, other):
        if not isinstance(other, StagedTree):
            return NotImplemented
        return (self.vertices, self.edges, self.root) == (other.vertices, other.edges, other.root)

    def __hash__(self):
        return hash((self.vertices, self.edges, self.root))

    @cached_property
    def children(self) -> dict:
        out = {v: [] for v in self.vertices}
        for e in self.edges:
            out[e.src].append(e)
        return {v: tuple(es) for v, es in out.items()}

    @cached_property
    def parent_edge(self) -> dict:
        return {e.dst: e for e in self.edges}

    @cached_property
    def _preorder(self) -> tuple:
        order, stack, seen = [], [self.root], set()
        while stack:
            v = stack.pop()
            if v in seen:
                break
            seen.add(v)
            order.append(v)
            stack.extend(e.dst for e in reversed(self.children.get(v, ())))
        return tuple(order)

    @property
    def preorder(self) -> tuple:
        return self._preorder

    @cached_property
    def florets(self) -> dict:
        """Outgoing edges of every non-leaf vertex, in traversal order."""
        return {v: self.children[v] for v in self._preorder if self.children[v]}

    @cached_property
    def leaves(self) -> tuple:
        return tuple(v for v in self._preorder if not self.children[v])

    @cached_property
    def labels(self) -> tuple:
        return tuple(dict.fromkeys(e.label for es in self.florets.values() for e in es))

    def path_edges(self, v) -> tuple:
        """Edges from the root down to ``v``."""
        out = []
        while v != self.root:
            e = self.parent_edge[v]
            out.append(e)
            v = e.src
        return tuple(reversed(out))

    def path_labels(self, v) -> tuple:
        return tuple(e.label for e in self.path_edges(v))

    def ancestors(self, v) -> tuple:
        """``v`` and all vertices above it, from ``v`` up to the root."""
        out = [v]
        while v != self.root:
            v = self.parent_edge[v].src
            out.append(v)
        return tuple(out)

    def subtree(self, v) -> "StagedTree":
        """The tree hanging below ``v``, with ``v`` as its root."""
        keep, stack = [], [v]
        while stack:
            w = stack.pop()
            keep.append(w)
            stack.extend(e.dst for e in reversed(self.children[w]))
        ks = set(keep)
        return StagedTree(
            tuple(u for u in self._preorder if u in ks),
            tuple(e for e in self.edges if e.src in ks),
            v,
        )

    def to_dict(self) -> dict:
        return {
            "vertices": list(self.vertices),
            "edges": [{"from": e.src, "to": e.dst, "label": e.label} for e in self.edges],
            "root": self.root,
        }


def make_tree(root, florets: Mapping) -> StagedTree:
    """Build a tree from ``{vertex: [(child, label), ...]}``."""
    vertices, edges = [root], []
    for v, out in florets.items():
        for child, label in out:
            edges.append(Edge(v, child, label))
            if child not in vertices:
                vertices.append(child)
        if v not in vertices:
            vertices.append(v)
    return StagedTree(tuple(vertices), tuple(edges), root)


@dataclass(frozen=True)
class StageCheck:
    valid: bool
    violation: tuple | None = None

    def __bool__(self):
        return self.valid


def validate_staged(T: StagedTree) -> StageCheck:
    """Check that any two florets carry equal or disjoint label sets.

    On failure the first offending pair of vertices is reported.
    """
    seen: list[tuple] = []
    for v, out in T.florets.items():
        labels = frozenset(e.label for e in out)
        for w, other in seen:
            if labels != other and labels & other:
                return StageCheck(False, (w, v))
        seen.append((v, labels))
    return StageCheck(True)


def tree_stages(T: StagedTree) -> tuple[tuple, ...]:
    """Distinct floret label sets in order of first appearance."""
    stages, seen = [], set()
    for out in T.florets.values():
        key = frozenset(e.label for e in out)
        if key not in seen:
            seen.add(key)
            stages.append(tuple(e.label for e in out))
    return tuple(stages)


def _require_staged(T):
    check = validate_staged(T)
    if not check:
        raise InvalidTree(f"stage condition fails for florets {check.violation!r}")


def _stage_box(stages) -> ParamBox:
    box = ParamBox()
    for stage in stages:
        box = box + ParamBox.simplex(len(stage) - 1)
    return box


def _labels_from_theta(stages, theta) -> dict:
    values, at = {}, 0
    for stage in stages:
        free = theta[at : at + len(stage) - 1]
        at += len(stage) - 1
        for label, t in zip(stage, free):
            values[label] = t
        values[stage[-1]] = 1 - sum(free, Fraction(0) if not free or isinstance(free[0], Fraction) else 0)
    return values


def labels_from_theta(T: StagedTree, theta) -> dict:
    """Label values for a parameter point of :func:`tree_model`."""
    return _labels_from_theta(tree_stages(T), tuple(theta))


def path_probabilities(T: StagedTree, labels: Mapping) -> Dist:
    """Product of edge labels along every root-to-leaf path.

    Label values may be anything :func:`~markovcomb.core.as_fraction` accepts.
    """
    labels = {k: as_fraction(v) for k, v in labels.items()}
    values = []
    for leaf in T.leaves:
        x = Fraction(1)
        for label in T.path_labels(leaf):
            x = x * labels[label]
        values.append(x)
    return Dist(T.leaves, values)


def _path_model(T: StagedTree, stages, name) -> ParametricModel:
    leaves = T.leaves
    paths = [T.path_labels(v) for v in leaves]

    def evaluator(theta):
        vals = _labels_from_theta(stages, theta)
        out = []
        for labels in paths:
            x = 1
            for label in labels:
                x = x * vals[label]
            out.append(x)
        return out

    return ParametricModel(leaves, _stage_box(stages), evaluator, name)


def tree_model(T: StagedTree, name: str = "tree") -> ParametricModel:
    """The staged tree model on root-to-leaf paths.

    One parameter block per stage: every label of the stage except the last
    is free, the last one is ``1`` minus their sum.
    """
    _require_staged(T)
    return _path_model(T, tree_stages(T), name)


def random_labels(stages, rng: np.random.Generator, max_weight: int = 97) -> dict:
    """Strictly positive rational stage vectors, one per stage."""
    out = {}
    for stage in stages:
        w = rng.integers(1, max_weight + 1, size=len(stage))
        total = int(w.sum())
        for label, x in zip(stage, w):
            out[label] = Fraction(int(x), total)
    return out


@dataclass(frozen=True, eq=False)
class TreeDecomposition:
    """A tree split at ``cut`` into a root part and the subtrees below the cut.

    ``mapping`` sends every path of the tree to the cut vertex it passes
    through; the cut vertices are the leaves of the root part ``S``.
    """

    tree: StagedTree
    cut: tuple
    subtrees: dict
    mapping: CategoryMapping

    @property
    def root_labels(self) -> dict:
        """Labels on the path from the root to every cut vertex."""
        return {k: self.tree.path_labels(k) for k in self.cut}


def decompose(T: StagedTree, cut: Sequence) -> TreeDecomposition:
    """Decompose ``T`` at a vertex cut.

    Every root-to-leaf path must meet the cut exactly once.  The cut is
    returned in traversal order.
    """
    cut_set = set(cut)
    if len(cut_set) != len(tuple(cut)):
        raise InvalidDecomposition("cut lists a vertex twice")
    if not cut_set <= set(T.vertices):
        raise InvalidDecomposition("cut contains unknown vertices")
    assignment = {}
    for leaf in T.leaves:
        hits = [v for v in T.ancestors(leaf) if v in cut_set]
        if len(hits) != 1:
            raise InvalidDecomposition(
                f"path to {leaf!r} meets the cut {len(hits)} times", leaf=leaf
            )
        assignment[leaf] = hits[0]
    ordered = tuple(v for v in T.preorder if v in cut_set)
    if set(assignment.values()) != cut_set:
        raise InvalidDecomposition("some cut vertex lies on no root-to-leaf path")
    mapping = make_mapping(T.leaves, assignment, ordered)
    subtrees = {k: T.subtree(k) for k in ordered}
    return TreeDecomposition(T, ordered, subtrees, mapping)


@dataclass(frozen=True)
class PathFactorization:
    """Split of every path's labels into a root part ``s`` and a tail part ``t``."""

    s: dict
    t: dict
    mapping: CategoryMapping

    def s_value(self, k, labels: Mapping) -> Fraction:
        return _product(self.s[k], labels)

    def t_value(self, leaf, labels: Mapping) -> Fraction:
        return _product(self.t[leaf], labels)


def _product(seq, labels):
    x = Fraction(1)
    for label in seq:
        x = x * labels[label]
    return x


def factorize(T: StagedTree, dec: TreeDecomposition) -> PathFactorization:
    """Labels of each path above (``s``, keyed by cut vertex) and below (``t``, keyed by leaf) the cut."""
    if dec.tree is not T:
        raise InvalidDecomposition("decomposition belongs to a different tree")
    s = {k: T.path_labels(k) for k in dec.cut}
    t = {}
    for leaf in T.leaves:
        k = dec.mapping(leaf)
        t[leaf] = T.path_labels(leaf)[len(s[k]) :]
    return PathFactorization(s, t, dec.mapping)


def _check_bijection(phi: Mapping, dec: TreeDecomposition, dec2: TreeDecomposition):
    if len(dec.cut) != len(dec2.cut):
        raise InvalidDecomposition("decompositions have different numbers of subtrees")
    if set(phi) != set(dec.cut) or set(phi.values()) != set(dec2.cut):
        raise InvalidDecomposition("phi is not a bijection between the cut vertices")


def _joint_values(labels: dict, T2: StagedTree, transport: Callable | None, rng) -> dict:
    """Label values for both trees.

    Shared names keep their value, ``transport`` supplies values for ``T2``
    labels, and stages of ``T2`` untouched by either are drawn at random.
    """
    values = dict(labels)
    if transport is not None:
        values.update(transport(dict(labels)))
    for stage in tree_stages(T2):
        known = [label for label in stage if label in values]
        if not known:
            values.update(random_labels([stage], rng))
        elif len(known) != len(stage):
            raise ValueError(f"partial values for the stage {stage!r} of the second tree")
    return values


def staged_meta_consistent(
    T: StagedTree,
    dec: TreeDecomposition,
    T2: StagedTree,
    dec2: TreeDecomposition,
    phi: Mapping,
    mode: str = "symbolic",
    transport: Callable | None = None,
    samples: int = 64,
    tol: float = 0.0,
    seed: int = 0,
) -> bool:
    """Are the two tree models meta-consistent along ``phi``?

    ``mode="symbolic"`` compares the label multisets of every root path
    ``k`` and ``phi(k)``.  ``mode="numeric"`` compares the root-path
    probabilities at random rational label values of ``T``; labels of ``T2``
    take the same value when they share a name, otherwise ``transport``
    (label values of ``T`` -> label values of ``T2``) supplies them.  Stages
    of ``T2`` reached by neither get random values.
    """
    _check_bijection(phi, dec, dec2)
    s1, s2 = dec.root_labels, dec2.root_labels
    if mode == "symbolic":
        return all(Counter(s1[k]) == Counter(s2[phi[k]]) for k in dec.cut)
    if mode != "numeric":
        raise ValueError(f"mode must be 'symbolic' or 'numeric', not {mode!r}")
    rng = np.random.Generator(np.random.PCG64(seed))
    stages = tree_stages(T)
    for _ in range(samples):
        vals = _joint_values(random_labels(stages, rng), T2, transport, rng)
        for k in dec.cut:
            if abs(_product(s1[k], vals) - _product(s2[phi[k]], vals)) > tol:
                return False
    return True


@dataclass(frozen=True, eq=False)
class StagedCombination:
    """Result of :func:`staged_combine`.

    ``pairs`` maps every leaf of the combined tree to the pair ``(i, j)`` of
    paths of the two input trees it represents; ``p`` and ``q`` are the
    category mappings of the two trees onto the shared metacategories (the
    cut vertices of the first tree).
    """

    tree: StagedTree
    decomposition: TreeDecomposition
    pairs: dict
    p: CategoryMapping
    q: CategoryMapping

    def as_product_dist(self, labels: Mapping) -> Dist:
        """Path probabilities of the combined tree indexed by ``(i, j)``."""
        d = path_probabilities(self.tree, labels)
        return d.relabel(self.pairs)


def staged_combine(
    T: StagedTree,
    dec: TreeDecomposition,
    T2: StagedTree,
    dec2: TreeDecomposition,
    phi: Mapping,
    mode: str | None = "symbolic",
    transport: Callable | None = None,
    sep: str = "/",
) -> StagedCombination:
    """Markov combination of two staged trees.

    A copy of the subtree of ``T2`` below ``phi(k)`` is attached to every
    leaf of ``T`` below the cut vertex ``k``.  Copies keep the labels of
    ``T2``, so all copies of one subtree share their stages and a label used
    by both trees stays one parameter.  The vertex ``w`` of the copy hanging
    at leaf ``i`` is named ``f"{i}{sep}{w}"``.

    Meta-consistency is checked first with ``mode`` (``None`` skips it).
    """
    _check_bijection(phi, dec, dec2)
    if mode is not None and not staged_meta_consistent(T, dec, T2, dec2, phi, mode, transport):
        raise NotMetaConsistent("root parts of the two trees do not have equal path probabilities")
    vertices, edges = list(T.vertices), list(T.edges)
    pairs = {}
    for leaf in T.leaves:
        k = dec.mapping(leaf)
        tail = dec2.subtrees[phi[k]]

        def rename(w, leaf=leaf, tail=tail):
            return leaf if w == tail.root else f"{leaf}{sep}{w}"

        for w in tail.vertices:
            if w != tail.root:
                vertices.append(rename(w))
        for e in tail.edges:
            edges.append(Edge(rename(e.src), rename(e.dst), e.label))
        for j in tail.leaves:
            pairs[rename(j)] = (leaf, j)
    combined = StagedTree(tuple(vertices), tuple(edges), T.root)
    _require_staged(combined)
    inverse = {v: k for k, v in phi.items()}
    q = make_mapping(T2.leaves, {j: inverse[dec2.mapping(j)] for j in T2.leaves}, dec.cut)
    return StagedCombination(combined, decompose(combined, dec.cut), pairs, dec.mapping, q)


def joint_tree_models(T: StagedTree, T2: StagedTree):
    """Tree models of ``T`` and ``T2`` on one parameter box.

    The box has one block per stage of either tree (stages of ``T`` first);
    shared labels are shared parameters.  Useful for forming the
    meta-combination of the two models directly.
    """
    stages = list(tree_stages(T))
    known = {frozenset(s) for s in stages}
    for s in tree_stages(T2):
        key = frozenset(s)
        if key in known:
            continue
        if any(key & k for k in known):
            raise InvalidTree("the two trees use overlapping but unequal stages")
        stages.append(s)
        known.add(key)
    return _path_model(T, stages, "tree"), _path_model(T2, stages, "tree'"), tuple(stages)


def models_equal(
    T1: StagedTree,
    T2: StagedTree,
    path_map: Mapping | None = None,
    label_map: Mapping | None = None,
    samples: int = 50,
    tol: float = 0.0,
    seed: int = 0,
    max_candidates: int = 5040,
) -> bool:
    """Do two staged trees define the same model?

    Path probabilities are compared at random rational label values of
    ``T1``, transported to ``T2`` by ``label_map`` (``T1`` label -> ``T2``
    label) and matched through ``path_map`` (``T1`` leaf -> ``T2`` leaf).
    Without ``label_map`` the identity is used when both trees carry the
    same labels; otherwise bijections between equal-size stages and label
    orders within them are searched, up to ``max_candidates`` renamings.
    """
    if path_map is None:
        if set(T1.leaves) != set(T2.leaves):
            raise ValueError("trees have different paths; supply a path bijection")
        path_map = {v: v for v in T1.leaves}
    if sorted(map(repr, path_map.values())) != sorted(map(repr, T2.leaves)) or set(path_map) != set(T1.leaves):
        raise ValueError("path_map is not a bijection between the paths of the trees")
    stages1 = tree_stages(T1)
    rng = np.random.Generator(np.random.PCG64(seed))
    points = [random_labels(stages1, rng) for _ in range(samples)]

    def matches(lmap):
        for vals in points:
            v2 = {lmap[label]: x for label, x in vals.items()}
            if any(label not in v2 for label in T2.labels):
                return False
            d1 = path_probabilities(T1, vals)
            d2 = path_probabilities(T2, v2)
            if any(abs(d1[i] - d2[path_map[i]]) > tol for i in T1.leaves):
                return False
        return True

    if label_map is not None:
        return matches(label_map)
    if set(T1.labels) == set(T2.labels) and matches({label: label for label in T1.labels}):
        return True
    for n, lmap in enumerate(_stage_renamings(stages1, tree_stages(T2))):
        if n >= max_candidates:
            break
        if matches(lmap):
            return True
    return False


def _stage_renamings(stages1, stages2):
    if len(stages1) != len(stages2):
        return
    for order in itertools.permutations(range(len(stages2))):
        if any(len(stages1[a]) != len(stages2[b]) for a, b in enumerate(order)):
            continue
        choices = [itertools.permutations(stages2[b]) for b in order]
        for picks in itertools.product(*choices):
            yield {
                label: target
                for stage, pick in zip(stages1, picks)
                for label, target in zip(stage, pick)
            }
