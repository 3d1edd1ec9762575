"""Seeded sampling from distributions and combined models.

Generators are numpy ``Generator`` objects on the PCG64 bit generator,
seeded through ``SeedSequence``.  Draws use inverse-CDF lookup over the exact
cumulative sums in index order, so a draw depends only on one uniform number
and the deterministic category order.
"""

from __future__ import annotations

import json
from bisect import bisect_right
from collections import Counter
from fractions import Fraction
from itertools import accumulate
from typing import Iterable, Sequence

import numpy as np

from .core import CategoryMapping, Dist, IndexedVector, aggregate, mapping_product
from .errors import ZeroAggregate
from .parametric.model import ParametricModel, coerce_theta, evaluate

__all__ = [
    "make_rng",
    "spawn",
    "CategoricalSampler",
    "sample_dist",
    "sample_meta_star",
    "sample_structured_super",
    "empirical_dist",
    "counts",
    "write_draws",
    "read_draws",
]


def make_rng(seed: int | np.random.SeedSequence) -> np.random.Generator:
    """PCG64 generator for an integer seed or a spawned seed sequence."""
    seq = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(int(seed))
    return np.random.Generator(np.random.PCG64(seq))


def spawn(seed: int, n: int) -> list[np.random.Generator]:
    """``n`` independent generators derived from one seed."""
    return [make_rng(s) for s in np.random.SeedSequence(int(seed)).spawn(n)]


class CategoricalSampler:
    """Inverse-CDF sampler over a fixed vector of non-negative weights."""

    def __init__(self, index: Sequence, weights: Sequence):
        weights = [Fraction(w) for w in weights]
        total = sum(weights, Fraction(0))
        if total <= 0:
            raise ValueError("weights must have positive total")
        self.index = tuple(index)
        self._cum = [float(c / total) for c in accumulate(weights)]
        self._cum[-1] = 1.0
        self._last = max(n for n, w in enumerate(weights) if w > 0)

    @classmethod
    def from_dist(cls, d: IndexedVector) -> "CategoricalSampler":
        return cls(d.index, d.entries)

    def draw(self, rng: np.random.Generator):
        return self.index[self._position(rng.random())]

    def draw_many(self, rng: np.random.Generator, size: int) -> list:
        u = rng.random(size)
        pos = np.minimum(np.searchsorted(self._cum, u, side="right"), self._last)
        return [self.index[n] for n in pos]

    def _position(self, u: float) -> int:
        return min(bisect_right(self._cum, u), self._last)


def sample_dist(d: Dist, rng: np.random.Generator, size: int | None = None):
    """One draw (``size=None``) or a list of ``size`` draws from ``d``."""
    sampler = CategoricalSampler.from_dist(d)
    return sampler.draw(rng) if size is None else sampler.draw_many(rng, size)


def _conditionals(d: Dist, m: CategoryMapping) -> dict:
    agg = aggregate(d, m)
    out = {}
    for k in m.codomain:
        fib = m.fibers[k]
        if agg[k] > 0:
            out[k] = CategoricalSampler(fib, [d[c] for c in fib])
    return out


def _pairs_by_block(first, conditional, rng, size, mapping):
    firsts = first.draw_many(rng, size)
    u = rng.random(size)
    out = []
    for i, x in zip(firsts, u):
        k = mapping(i)
        sampler = conditional.get(k)
        if sampler is None:
            raise ZeroAggregate(k)
        out.append((i, sampler.index[sampler._position(x)]))
    return out


def sample_meta_star(
    f: ParametricModel,
    g: ParametricModel,
    p: CategoryMapping,
    q: CategoryMapping,
    theta,
    rng: np.random.Generator,
    size: int | None = None,
):
    """Draw ``(i, j)`` from the meta-combination of ``f`` and ``g`` at ``theta``.

    ``i`` is drawn from ``f(theta)``, then ``j`` from ``g(theta)``
    conditioned on the block ``J_{p(i)}``.
    """
    mapping_product(p, q)
    theta = coerce_theta(theta)
    fd, gd = evaluate(f, theta), evaluate(g, theta)
    first = CategoricalSampler.from_dist(fd)
    cond = _conditionals(gd, q)
    draws = _pairs_by_block(first, cond, rng, 1 if size is None else size, p)
    return draws[0] if size is None else draws


def sample_structured_super(
    f: ParametricModel,
    h: ParametricModel,
    g: ParametricModel,
    p: CategoryMapping,
    q: CategoryMapping,
    theta1,
    theta2,
    theta3,
    rng: np.random.Generator,
    size: int | None = None,
):
    """Draw ``(i, j)`` from the structured super combination.

    First ``k`` from ``h(theta2)``, then ``i`` from ``f(theta1)`` restricted
    to ``I_k`` and ``j`` from ``g(theta3)`` restricted to ``J_k``.
    """
    mapping_product(p, q)
    hd = evaluate(h, theta2)
    fc = _conditionals(evaluate(f, theta1), p)
    gc = _conditionals(evaluate(g, theta3), q)
    n = 1 if size is None else size
    ks = CategoricalSampler.from_dist(hd).draw_many(rng, n)
    u = rng.random((n, 2))
    out = []
    for k, (a, b) in zip(ks, u):
        if k not in fc or k not in gc:
            raise ZeroAggregate(k)
        fs, gs = fc[k], gc[k]
        out.append((fs.index[fs._position(a)], gs.index[gs._position(b)]))
    return out[0] if size is None else out


def counts(draws: Iterable, index: Sequence) -> list[int]:
    """Occurrences of every category of ``index`` among the draws."""
    tally = Counter(draws)
    extra = set(tally) - set(index)
    if extra:
        raise ValueError(f"draws outside the index: {sorted(map(repr, extra))[:3]}")
    return [tally.get(c, 0) for c in index]


def empirical_dist(draws: Sequence, index: Sequence | None = None) -> Dist:
    """Relative frequencies as an exact distribution.

    Without ``index`` the categories are listed in order of first appearance.
    """
    draws = list(draws)
    if not draws:
        raise ValueError("no draws")
    if index is None:
        index = tuple(dict.fromkeys(draws))
    n = len(draws)
    return Dist(index, [Fraction(c, n) for c in counts(draws, index)])


def _plain(c):
    return [_plain(x) for x in c] if isinstance(c, tuple) else c


def write_draws(draws: Iterable, path) -> None:
    """One JSON value per line; pair categories become arrays."""
    with open(path, "w", encoding="utf-8") as fh:
        for c in draws:
            fh.write(json.dumps(_plain(c), ensure_ascii=False, separators=(",", ":")))
            fh.write("\n")


def _tuple(c):
    return tuple(_tuple(x) for x in c) if isinstance(c, list) else c


def read_draws(path) -> list:
    with open(path, encoding="utf-8") as fh:
        return [_tuple(json.loads(line)) for line in fh if line.strip()]
