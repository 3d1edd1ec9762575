"""Closed-form maximum likelihood for Markov combinations of saturated models.

The model is the pure mixture ``m_ij = lambda_i mu_j h_k`` on the mapping
product.  Its MLE is rational in the data, ``u_i v_j / (u_{M,k} xbar)``, and
is certified by a Horn pair ``(H, lambda)``: an integer matrix whose columns
sum to zero together with a coefficient vector such that the MLE is a
monomial in the linear forms ``H x``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import CategoryMapping, Dist, IndexedVector, ProductIndex, mapping_product
from .errors import AllZero, IndexMismatch, SupportViolation, ZeroBlock

__all__ = [
    "HornPair",
    "margins",
    "mle",
    "build_horn_pair",
    "horn_map",
    "verify_horn_identity",
    "log_likelihood",
    "model_point",
]


def _check_data(x: IndexedVector, prod: ProductIndex) -> IndexedVector:
    if set(x.index) != set(prod.pairs) or len(x) != len(prod):
        raise IndexMismatch("data are not indexed by the mapping product")
    if any(v < 0 for v in x.entries):
        raise SupportViolation("data contain a negative entry")
    if x.total() == 0:
        raise AllZero("data are all zero")
    return x.reindex(prod.pairs) if x.index != prod.pairs else x


def margins(x: IndexedVector, prod: ProductIndex) -> tuple[dict, dict, dict, Fraction]:
    """``(u, v, u_M, xbar)``: row sums, column sums, block sums and total."""
    u = {i: Fraction(0) for i in prod.p.domain}
    v = {j: Fraction(0) for j in prod.q.domain}
    um = {k: Fraction(0) for k in prod.codomain}
    for (k, i, j), value in zip(prod.triples, x.entries):
        u[i] += value
        v[j] += value
        um[k] += value
    return u, v, um, sum(um.values(), Fraction(0))


def mle(x: IndexedVector, p: CategoryMapping, q: CategoryMapping) -> Dist:
    """Maximum likelihood estimate ``u_i v_j / (u_{M,k} xbar)``.

    ``x`` may hold counts, intensities or a distribution over ``I x_M J``.
    Blocks without data get probability zero.
    """
    prod = mapping_product(p, q)
    x = _check_data(x, prod)
    u, v, um, xbar = margins(x, prod)
    values = []
    for (k, i, j), value in zip(prod.triples, x.entries):
        if um[k] == 0:
            if value:
                raise ZeroBlock(f"block {k!r} sums to zero but holds positive data", metacategory=k)
            values.append(Fraction(0))
        else:
            values.append(u[i] * v[j] / (um[k] * xbar))
    return Dist(prod.pairs, values)


@dataclass(frozen=True)
class HornPair:
    """Integer matrix ``H`` and coefficients ``lam`` over the product columns.

    Rows are labeled ``("I", i, k)``, ``("J", j, k)`` and ``("M", k)`` block
    by block in metacategory order, followed by the all ``-1`` row
    ``("total",)``.  ``blocks`` gives the metacategory of every column.
    """

    H: tuple
    lam: tuple
    row_labels: tuple
    columns: tuple
    blocks: tuple

    def as_array(self) -> np.ndarray:
        return np.array(self.H, dtype=np.int64).reshape(len(self.row_labels), len(self.columns))

    def column_sums(self) -> tuple:
        return tuple(sum(row[c] for row in self.H) for c in range(len(self.columns)))

    def block(self, k) -> np.ndarray:
        """The submatrix ``H_k``: rows and columns of block ``k``."""
        rows = [n for n, lab in enumerate(self.row_labels) if lab[0] != "total" and lab[-1] == k]
        cols = [n for n, c in enumerate(self.blocks) if c == k]
        return self.as_array()[np.ix_(rows, cols)]


def build_horn_pair(p: CategoryMapping, q: CategoryMapping) -> HornPair:
    """Horn pair certifying the closed-form MLE.

    For each metacategory ``k`` the block ``H_k`` has one row per ``i`` in
    ``I_k`` (indicator of the columns ``(i, *)``), one per ``j`` in ``J_k``
    (indicator of ``(*, j)``) and a row of ``-1``; a final row of ``-1``
    spans all columns.  Columns follow the product order.
    """
    prod = mapping_product(p, q)
    cols = prod.pairs
    pos = {c: n for n, c in enumerate(cols)}
    rows, labels = [], []
    for k in prod.codomain:
        block = prod.block(k)
        for i in p.fibers[k]:
            rows.append([1 if c in block and c[0] == i else 0 for c in cols])
            labels.append(("I", i, k))
        for j in q.fibers[k]:
            rows.append([1 if c in block and c[1] == j else 0 for c in cols])
            labels.append(("J", j, k))
        row = [0] * len(cols)
        for c in block:
            row[pos[c]] = -1
        rows.append(row)
        labels.append(("M", k))
    rows.append([-1] * len(cols))
    labels.append(("total",))
    return HornPair(
        tuple(tuple(r) for r in rows), (1,) * len(cols), tuple(labels), cols,
        tuple(k for k, _, _ in prod.triples),
    )


def horn_map(hp: HornPair, x: IndexedVector) -> IndexedVector:
    """Evaluate ``lam_c * prod_l (H x)_l ** H[l][c]`` exactly for every column ``c``."""
    if set(x.index) != set(hp.columns):
        raise IndexMismatch("data are not indexed by the Horn pair columns")
    xs = [x[c] for c in hp.columns]
    forms = [sum((h * v for h, v in zip(row, xs)), Fraction(0)) for row in hp.H]
    out = []
    for c in range(len(hp.columns)):
        value = Fraction(hp.lam[c])
        for form, row in zip(forms, hp.H):
            e = row[c]
            if e == 0:
                continue
            if form == 0:
                raise SupportViolation("a linear form vanishes where the certificate needs it")
            value *= form**e
        out.append(value)
    return IndexedVector(hp.columns, out)


def verify_horn_identity(hp: HornPair, x: IndexedVector, p: CategoryMapping, q: CategoryMapping) -> bool:
    """Does the Horn pair reproduce :func:`mle` at ``x`` exactly?

    ``x`` must be strictly positive since the certificate has negative
    exponents.
    """
    if any(v <= 0 for v in x.entries):
        raise SupportViolation("Horn verification needs strictly positive data")
    return horn_map(hp, x).entries == mle(x, p, q).reindex(hp.columns).entries


def log_likelihood(x: IndexedVector, m: IndexedVector) -> float:
    """``sum_ij x_ij log m_ij`` (terms with ``x_ij = 0`` contribute nothing)."""
    if set(x.index) != set(m.index):
        raise IndexMismatch("data and model point use different indexes")
    total = 0.0
    for c, value in x.items():
        if value == 0:
            continue
        mv = m[c]
        if mv <= 0:
            raise SupportViolation(f"model assigns zero probability to observed cell {c!r}")
        total += float(value) * math.log(mv)
    return total


def model_point(p: CategoryMapping, q: CategoryMapping, h, lam, mu) -> Dist:
    """Pure mixture ``lambda_i mu_j h_k`` from dicts ``h``, ``lam``, ``mu``."""
    prod = mapping_product(p, q)
    return Dist(prod.pairs, [lam[i] * mu[j] * h[k] for k, i, j in prod.triples])
