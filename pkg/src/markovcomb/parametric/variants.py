"""Combination variants for parametric models, and mixtures."""

from __future__ import annotations

from typing import Callable, Iterable

from ..combine import left_combine, right_combine
from ..core import (
    CategoryMapping,
    Dist,
    aggregate,
    constant_mapping,
    make_mapping,
    mapping_product,
)
from ..errors import (
    EmptyParameterSet,
    InconsistentPair,
    NotMetaConsistent,
    ZeroAggregate,
)
from .model import (
    CONSISTENCY_TOL,
    CombinedModel,
    ParamBox,
    ParametricModel,
    aggregate_gap,
    aggregate_model,
    coerce_theta,
    evaluate,
    is_meta_consistent,
    reparametrize,
)

__all__ = [
    "meta_star",
    "lower_combine",
    "restricted_lower",
    "upper_combine",
    "restricted_upper",
    "super_combine",
    "restricted_super",
    "structured_super",
    "structured_marginals",
    "mixture",
    "mixture_via_chain",
    "two_point_model",
]


def _same_box(f, g):
    if f.box != g.box:
        raise ValueError("both models must share one parameter box")


def _split(theta, *dims):
    out, at = [], 0
    for d in dims:
        out.append(tuple(theta[at : at + d]))
        at += d
    out.append(tuple(theta[at:]))
    return out


def _flag(value) -> int:
    if value not in (0, 1):
        raise ValueError(f"flag must be 0 or 1, not {value!r}")
    return int(value)


def _conditional_factors(d: Dist, m: CategoryMapping):
    agg = aggregate(d, m)
    out = {}
    for c, x in d.items():
        k = m(c)
        if agg[k] == 0:
            raise ZeroAggregate(k)
        out[c] = x / agg[k]
    return out


def _structured_values(fd: Dist, h: dict, gd: Dist, p, q, prod):
    fc = _conditional_factors(fd, p)
    gc = _conditional_factors(gd, q)
    return [fc[i] * h[k] * gc[j] for k, i, j in prod.triples]


def meta_star(
    f: ParametricModel,
    g: ParametricModel,
    p: CategoryMapping,
    q: CategoryMapping,
    points=None,
    tol: float = CONSISTENCY_TOL,
    strict: bool = True,
    check: bool = True,
) -> CombinedModel:
    """Meta-Markov combination: the Markov combination taken pointwise in theta.

    Meta-consistency is verified on ``points`` (default: the box's 64-point
    low-discrepancy sample) before the model is built, and again at every
    evaluation.  ``check=False`` skips the up-front sample for pairs that are
    consistent by construction; the per-evaluation check always runs.
    """
    _same_box(f, g)
    prod = mapping_product(p, q)
    report = is_meta_consistent(f, g, p, q, points, tol) if check else True
    if not report:
        raise NotMetaConsistent(
            f"models are not meta-consistent (aggregate gap {report.worst_gap:.3g})",
            theta=report.worst_theta,
            gap=report.worst_gap,
        )

    def evaluator(theta):
        fd, gd = evaluate(f, theta), evaluate(g, theta)
        gap = aggregate_gap(fd, gd, p, q)
        if gap > tol:
            raise NotMetaConsistent(
                f"evaluations are not consistent at {theta!r}", theta=theta, gap=float(gap)
            )
        return left_combine(fd, gd, p, q, strict=strict, warn=False).entries

    return CombinedModel(
        prod.pairs, f.box, evaluator, f"({f.name} * {g.name})",
        variant="meta_star", components=(f, g), mappings=(p, q), product=prod,
    )


def lower_combine(f, g, p, q, tol: float = CONSISTENCY_TOL) -> CombinedModel:
    """Lower combination on pairs ``(theta1, theta2)`` with consistent evaluations."""
    prod = mapping_product(p, q)
    df = f.dimension

    def admits(theta):
        t1, t2, _ = _split(coerce_theta(theta), df, g.dimension)
        return aggregate_gap(evaluate(f, t1), evaluate(g, t2), p, q) <= tol

    def evaluator(theta):
        t1, t2, _ = _split(theta, df, g.dimension)
        fd, gd = evaluate(f, t1), evaluate(g, t2)
        if aggregate_gap(fd, gd, p, q) > tol:
            raise InconsistentPair(
                f"f{t1!r} and g{t2!r} are not consistent", theta1=t1, theta2=t2
            )
        return left_combine(fd, gd, p, q).entries

    return CombinedModel(
        prod.pairs, f.box + g.box, evaluator, f"lower({f.name}, {g.name})",
        variant="lower", components=(f, g), mappings=(p, q), product=prod, admits=admits,
    )


def restricted_lower(
    f: ParametricModel,
    g: ParametricModel,
    p: CategoryMapping,
    q: CategoryMapping,
    grid: Iterable | None = None,
    predicate: Callable | None = None,
    solver: Callable | str | None = None,
    tol: float = CONSISTENCY_TOL,
) -> CombinedModel:
    """Restricted lower combination on the consistent part of the diagonal.

    The admissible set is found by filtering candidate points: an explicit
    ``grid``, the roots returned by ``solver`` (``"exact"`` uses the symbolic
    solver available for polynomial models), or, when neither is given, the
    consistency test itself applied lazily at evaluation time.  ``predicate``
    further restricts the set.
    """
    _same_box(f, g)
    prod = mapping_product(p, q)

    def consistent_at(theta):
        return aggregate_gap(evaluate(f, theta), evaluate(g, theta), p, q) <= tol

    def admits(theta):
        theta = coerce_theta(theta)
        if not f.box.contains(theta):
            return False
        if predicate is not None and not predicate(theta):
            return False
        return consistent_at(theta)

    candidates = None
    if solver is not None:
        if solver == "exact":
            from .constructions import solve_consistency_exact

            solver = solve_consistency_exact
        found = solver(f, g, p, q)
        if found is not None:
            candidates = list(found)
    if grid is not None:
        candidates = (candidates or []) + [coerce_theta(t) for t in grid]
    parameter_set = None
    if candidates is not None:
        parameter_set = tuple(dict.fromkeys(t for t in candidates if admits(t)))
        if not parameter_set:
            raise EmptyParameterSet("no candidate parameter makes the evaluations consistent")

    def evaluator(theta):
        if predicate is not None and not predicate(theta):
            raise InconsistentPair(f"{theta!r} is excluded by the predicate", theta=theta)
        fd, gd = evaluate(f, theta), evaluate(g, theta)
        if aggregate_gap(fd, gd, p, q) > tol:
            raise InconsistentPair(f"evaluations are not consistent at {theta!r}", theta=theta)
        return left_combine(fd, gd, p, q).entries

    return CombinedModel(
        prod.pairs, f.box, evaluator, f"restricted_lower({f.name}, {g.name})",
        variant="restricted_lower", components=(f, g), mappings=(p, q), product=prod,
        parameter_set=parameter_set, admits=admits,
    )


def upper_combine(f, g, p, q) -> CombinedModel:
    """Upper combination on ``(theta1, theta2, flag)``: flag 0 left, flag 1 right."""
    prod = mapping_product(p, q)

    def evaluator(theta):
        t1, t2, rest = _split(theta, f.dimension, g.dimension)
        fd, gd = evaluate(f, t1), evaluate(g, t2)
        combine = left_combine if _flag(rest[0]) == 0 else right_combine
        return combine(fd, gd, p, q).entries

    return CombinedModel(
        prod.pairs, f.box + g.box + ParamBox.flag(), evaluator, f"upper({f.name}, {g.name})",
        variant="upper", components=(f, g), mappings=(p, q), product=prod,
    )


def restricted_upper(f, g, p, q) -> CombinedModel:
    """Upper combination with a shared parameter: ``(theta, flag)``."""
    _same_box(f, g)
    prod = mapping_product(p, q)

    def evaluator(theta):
        t, rest = _split(theta, f.dimension)
        fd, gd = evaluate(f, t), evaluate(g, t)
        combine = left_combine if _flag(rest[0]) == 0 else right_combine
        return combine(fd, gd, p, q).entries

    return CombinedModel(
        prod.pairs, f.box + ParamBox.flag(), evaluator, f"restricted_upper({f.name}, {g.name})",
        variant="restricted_upper", components=(f, g), mappings=(p, q), product=prod,
    )


def super_combine(f, g, p, q) -> CombinedModel:
    """Super combination on ``(theta1, theta2, theta3, flag)``.

    Entry ``f_i(t1)/f_M,k(t1) * a_k(t2) * g_j(t3)/g_M,k(t3)`` where ``a`` is the
    aggregate of ``f`` (flag 0) or of ``g`` (flag 1).
    """
    _same_box(f, g)
    prod = mapping_product(p, q)
    d = f.dimension

    def evaluator(theta):
        t1, t2, t3, rest = _split(theta, d, d, d)
        middle = (f, p) if _flag(rest[0]) == 0 else (g, q)
        h = aggregate(evaluate(middle[0], t2), middle[1]).as_dict()
        return _structured_values(evaluate(f, t1), h, evaluate(g, t3), p, q, prod)

    return CombinedModel(
        prod.pairs, f.box.power(3) + ParamBox.flag(), evaluator, f"super({f.name}, {g.name})",
        variant="super", components=(f, g), mappings=(p, q), product=prod,
    )


def restricted_super(f, g, p, q) -> CombinedModel:
    """Super combination with ``theta3 = theta1``: parameters ``(theta1, theta2, flag)``."""
    _same_box(f, g)
    prod = mapping_product(p, q)
    d = f.dimension

    def evaluator(theta):
        t1, t2, rest = _split(theta, d, d)
        middle = (f, p) if _flag(rest[0]) == 0 else (g, q)
        h = aggregate(evaluate(middle[0], t2), middle[1]).as_dict()
        return _structured_values(evaluate(f, t1), h, evaluate(g, t1), p, q, prod)

    return CombinedModel(
        prod.pairs, f.box.power(2) + ParamBox.flag(), evaluator,
        f"restricted_super({f.name}, {g.name})",
        variant="restricted_super", components=(f, g), mappings=(p, q), product=prod,
    )


def structured_super(f, h, g, p, q) -> CombinedModel:
    """Structured super combination with respect to a model ``h`` on ``M``.

    Parameters are ``(theta1, theta2, theta3)`` for ``f``, ``h`` and ``g``.
    """
    prod = mapping_product(p, q)
    if set(h.index) != set(p.codomain):
        raise ValueError("h must be a model on the shared metacategories")

    def evaluator(theta):
        t1, t2, t3, _ = _split(theta, f.dimension, h.dimension, g.dimension)
        hd = evaluate(h, t2).as_dict()
        return _structured_values(evaluate(f, t1), hd, evaluate(g, t3), p, q, prod)

    return CombinedModel(
        prod.pairs, f.box + h.box + g.box, evaluator,
        f"structured({f.name}, {h.name}, {g.name})",
        variant="structured_super", components=(f, h, g), mappings=(p, q), product=prod,
    )


def structured_marginals(c: CombinedModel):
    """The ``I``-, ``J``- and ``M``-aggregates of a structured super combination.

    Returns ``(mI, mJ, mM)``: ``mI`` is parametrized by ``(theta1, theta2)``,
    ``mJ`` by ``(theta2, theta3)`` and ``mM`` is ``h`` itself.
    """
    if c.variant != "structured_super":
        raise ValueError("expected a structured super combination")
    f, h, g = c.components
    p, q = c.mappings

    def marginal_i(theta):
        t1, t2, _ = _split(theta, f.dimension, h.dimension)
        fc = _conditional_factors(evaluate(f, t1), p)
        hd = evaluate(h, t2)
        return [fc[i] * hd[p(i)] for i in f.index]

    def marginal_j(theta):
        t2, t3, _ = _split(theta, h.dimension, g.dimension)
        gc = _conditional_factors(evaluate(g, t3), q)
        hd = evaluate(h, t2)
        return [hd[q(j)] * gc[j] for j in g.index]

    m_i = ParametricModel(f.index, f.box + h.box, marginal_i, f"{c.name}_I")
    m_j = ParametricModel(g.index, h.box + g.box, marginal_j, f"{c.name}_J")
    return m_i, m_j, h


def mixture(f: ParametricModel, g: ParametricModel) -> ParametricModel:
    """Binary mixture with weight parameter appended: ``(theta, lam)``."""
    _same_box(f, g)
    if f.index != g.index:
        raise ValueError("mixture components must share the same index")
    d = f.dimension
    two = two_point_model()

    def evaluator(theta):
        t, weight = _split(theta, d)
        lam = evaluate(two, weight).entries[0]
        fd, gd = evaluate(f, t), evaluate(g, t)
        return [lam * a + (1 - lam) * b for a, b in zip(fd.entries, gd.entries)]

    return ParametricModel(f.index, f.box + ParamBox.unit_cube(1), evaluator, f"Mixt({f.name}, {g.name})")


def two_point_model() -> ParametricModel:
    """The one-parameter model ``lam -> (lam, 1 - lam)`` on categories ``"0", "1"``."""
    return ParametricModel(("0", "1"), ParamBox.unit_cube(1), lambda t: (t[0], 1 - t[0]), "2")


def mixture_via_chain(f: ParametricModel, g: ParametricModel) -> ParametricModel:
    """Build the binary mixture using only combinations and aggregates.

    1. ``f x 2`` and ``g x 2`` as combinations over a one-point metacategory set;
    2. collapse the ``(1 - lam)`` part of ``f x 2`` and the ``lam`` part of
       ``g x 2`` to single categories;
    3. meta-combine the two over ``{0, 1}``, grouping ``lam f_i`` with ``lam``
       and ``(1 - lam) g_i`` with ``1 - lam``;
    4. aggregate ``lam f_i`` and ``(1 - lam) g_i`` pairwise.
    """
    _same_box(f, g)
    if f.index != g.index:
        raise ValueError("mixture components must share the same index")
    d = f.dimension
    two = two_point_model()
    box = f.box + two.box
    first, second = (lambda t: tuple(t[:d])), (lambda t: tuple(t[d:]))
    f_, g_ = reparametrize(f, box, first), reparametrize(g, box, first)
    two_ = reparametrize(two, box, second)

    dot = "•"
    to_dot = constant_mapping(f.index, dot)
    two_to_dot = constant_mapping(two.index, dot)
    # every pair below has equal aggregates by construction
    f2 = meta_star(f_, two_, to_dot, two_to_dot, strict=False, check=False)
    g2 = meta_star(g_, two_, to_dot, two_to_dot, strict=False, check=False)

    rest = ("rest",)
    a1 = make_mapping(f2.index, {(i, s): (("keep", i) if s == "0" else rest) for i, s in f2.index})
    a2 = make_mapping(g2.index, {(i, s): (rest if s == "0" else ("keep", i)) for i, s in g2.index})
    f2m, g2m = aggregate_model(f2, a1), aggregate_model(g2, a2)

    b1 = make_mapping(f2m.index, {c: ("1" if c == rest else "0") for c in f2m.index}, ("0", "1"))
    b2 = make_mapping(g2m.index, {c: ("0" if c == rest else "1") for c in g2m.index}, ("0", "1"))
    combined = meta_star(f2m, g2m, b1, b2, strict=False, check=False)

    def back_to_i(pair):
        left, right = pair
        return left[1] if left != rest else right[1]

    a4 = make_mapping(combined.index, {c: back_to_i(c) for c in combined.index}, f.index)
    out = aggregate_model(combined, a4)
    return ParametricModel(out.index, out.box, out.evaluator, f"chain({f.name}, {g.name})")
