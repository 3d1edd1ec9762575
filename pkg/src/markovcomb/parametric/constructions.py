"""Concrete model families and the saturated-model constructions.

Includes the standard saturated parametrisation, the binomial family,
lifting a model on ``M`` to ``I`` along a category mapping, the canonical
meta-consistent pair of saturated models, polynomial models loaded from
tables, and dimension counts for the resulting pure mixtures.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

import numpy as np

from ..core import CategoryMapping, Dist, aggregate, as_fraction, mapping_product
from .model import ParamBox, ParametricModel, coerce_theta, evaluate, reparametrize

__all__ = [
    "saturated",
    "saturated_preimage",
    "binomial",
    "model_lift",
    "lift_preimage",
    "consistent_saturated_pair",
    "pure_mixture_coordinates",
    "expfam_combination_dim",
    "numeric_jacobian",
    "jacobian_rank",
    "polynomial_model",
    "piecewise_polynomial_model",
    "solve_consistency_exact",
]


def saturated(index: Sequence) -> ParametricModel:
    """Standard parametrisation ``(1 - sum(theta), theta_1, ..., theta_n)``."""
    index = tuple(index)
    if not index:
        raise ValueError("saturated model needs at least one category")
    d = len(index) - 1

    def evaluator(theta):
        return (1 - sum(theta),) + tuple(theta)

    return ParametricModel(index, ParamBox.simplex(d), evaluator, f"saturated[{len(index)}]")


def saturated_preimage(d: Dist) -> tuple:
    """Parameters at which the standard saturated model equals ``d``."""
    return tuple(d.entries[1:])


def binomial(n: int) -> ParametricModel:
    """Binomial(n, theta) on categories ``"0", ..., "n"``."""
    if n < 0:
        raise ValueError("n must be non-negative")
    coeffs = [math.comb(n, i) for i in range(n + 1)]

    def evaluator(theta):
        (t,) = theta
        return tuple(c * t**i * (1 - t) ** (n - i) for i, c in enumerate(coeffs))

    return ParametricModel(
        tuple(str(i) for i in range(n + 1)), ParamBox.unit_cube(1), evaluator, f"binomial[{n}]"
    )


def _lift_layout(p: CategoryMapping):
    """Free weight coordinates: every fiber element except the first."""
    layout = []
    for k in p.codomain:
        fib = p.fibers[k]
        layout.append((k, fib[0], fib[1:]))
    return layout


def _lift_box(p: CategoryMapping) -> ParamBox:
    box = ParamBox()
    for _, _, free in _lift_layout(p):
        box = box + ParamBox.simplex(len(free))
    return box


def _lift_weights(p, weights):
    """Map free weight coordinates to ``{i: lambda_{p(i), i}}``."""
    out, at = {}, 0
    for _, first, free in _lift_layout(p):
        w = weights[at : at + len(free)]
        at += len(free)
        out[first] = 1 - sum(w, Fraction(0) if not w or isinstance(w[0], Fraction) else 0)
        out.update(zip(free, w))
    return out


def model_lift(p: CategoryMapping, h: ParametricModel) -> ParametricModel:
    """A model ``f`` on ``I`` with ``f_M = h`` identically.

    Parameters are ``(theta_h, weights)``: for every metacategory ``k`` the
    within-fiber weights ``lambda_{k,i}`` summing to one, stored by their free
    coordinates (all but the first element of each fiber).  ``f_i`` is
    ``lambda_{k,i} * h_k(theta_h)``.
    """
    if set(h.index) != set(p.codomain):
        raise ValueError("h must be a model on the codomain of the mapping")
    dh = h.dimension

    def evaluator(theta):
        hd = evaluate(h, theta[:dh])
        lam = _lift_weights(p, theta[dh:])
        return tuple(lam[i] * hd[p(i)] for i in p.domain)

    return ParametricModel(p.domain, h.box + _lift_box(p), evaluator, f"lift({h.name})")


def _weights_for(p: CategoryMapping, a: Dist) -> tuple:
    agg = aggregate(a.reindex(p.domain) if a.index != p.domain else a, p)
    out = []
    for k, _, free in _lift_layout(p):
        for i in free:
            out.append(a[i] / agg[k] if agg[k] != 0 else Fraction(0))
    return tuple(out)


def lift_preimage(p: CategoryMapping, h_theta, a: Dist) -> tuple:
    """Parameters of :func:`model_lift` reaching ``a``, given ``h(h_theta) = a_M``.

    The weights are ``lambda_{k,i} = a_i / a_{M,k}``; on a zero block the
    whole weight goes to the fiber's first element.
    """
    return tuple(coerce_theta(h_theta)) + _weights_for(p, a)


def consistent_saturated_pair(p: CategoryMapping, q: CategoryMapping):
    """Meta-consistent saturated models on ``I`` and ``J``.

    Both are lifts of the standard saturated model ``h`` on ``M``.  They share
    the parameter box ``(theta_h, lambda-weights, mu-weights)``; ``f`` ignores
    the ``mu`` block and ``g`` the ``lambda`` block.  Their meta-combination is
    the pure mixture ``lambda_{k,i} mu_{k,j} h_k``.
    """
    mapping_product(p, q)
    h = saturated(p.codomain)
    f0, g0 = model_lift(p, h), model_lift(q, h)
    dh = h.dimension
    dl, dm = f0.dimension - dh, g0.dimension - dh
    box = h.box + _lift_box(p) + _lift_box(q)
    f = reparametrize(f0, box, lambda t: tuple(t[: dh + dl]), "f_sat")
    g = reparametrize(g0, box, lambda t: tuple(t[:dh]) + tuple(t[dh + dl : dh + dl + dm]), "g_sat")
    return f, g


def pure_mixture_coordinates(p: CategoryMapping, q: CategoryMapping, a: Dist, b: Dist) -> tuple:
    """Parameters of :func:`consistent_saturated_pair` with ``f = a`` and ``g = b``.

    Requires ``a`` and ``b`` consistent.  ``h_k`` is the common aggregate,
    ``lambda_i = a_i / h_k`` and ``mu_j = b_j / h_k``.
    """
    am = aggregate(a, p)
    if am != aggregate(b, q).reindex(am.index):
        raise ValueError("a and b are not consistent")
    return saturated_preimage(am) + _weights_for(p, a) + _weights_for(q, b)


def expfam_combination_dim(p: CategoryMapping, q: CategoryMapping) -> tuple[int, int]:
    """``(|I| + |J| - |M| - 1, sum_k |I_k| |J_k| - 1)``: model and ambient dimension."""
    prod = mapping_product(p, q)
    return len(p.domain) + len(q.domain) - len(p.codomain) - 1, len(prod) - 1


def numeric_jacobian(model: ParametricModel, theta, step=Fraction(1, 10**6)) -> np.ndarray:
    """Central-difference Jacobian of ``theta -> model(theta)``.

    Evaluations are exact when the model accepts Fractions, so the only error
    is the truncation error of the difference quotient.
    """
    theta = [as_fraction(t) if not isinstance(t, float) else Fraction(t) for t in coerce_theta(theta)]
    step = Fraction(step)
    cols = []
    for n in range(len(theta)):
        up, down = list(theta), list(theta)
        up[n] += step
        down[n] -= step
        fu = evaluate(model, tuple(up)).entries
        fd = evaluate(model, tuple(down)).entries
        cols.append([float((a - b) / (2 * step)) for a, b in zip(fu, fd)])
    return np.array(cols, dtype=float).T.reshape(len(model.index), len(theta))


def jacobian_rank(model: ParametricModel, theta, tol: float = 1e-8) -> int:
    """Number of singular values of the numeric Jacobian above ``tol``."""
    jac = numeric_jacobian(model, theta)
    if jac.size == 0:
        return 0
    return int(np.sum(np.linalg.svd(jac, compute_uv=False) > tol))


def _parse_polynomial(terms, dim):
    out = []
    for term in terms:
        if isinstance(term, dict):
            coef, powers = term["coef"], term.get("powers", [0] * dim)
        else:
            coef, powers = term
        powers = tuple(int(e) for e in powers)
        if len(powers) != dim or any(e < 0 for e in powers):
            raise ValueError(f"bad exponent vector {powers!r} for dimension {dim}")
        out.append((as_fraction(coef), powers))
    return tuple(out)


def _eval_polynomial(poly, theta):
    total = 0
    for coef, powers in poly:
        term = coef
        for t, e in zip(theta, powers):
            if e:
                term = term * t**e
        total = total + term
    return total


def polynomial_model(index, lower, upper, entries, name: str = "polynomial") -> ParametricModel:
    """A model whose entries are polynomials with rational coefficients.

    ``entries`` holds one polynomial per category, each a list of terms
    ``(coef, powers)`` or ``{"coef": "3/4", "powers": [1, 0]}``.
    """
    box = ParamBox(lower, upper)
    polys = tuple(_parse_polynomial(e, box.dimension) for e in entries)
    if len(polys) != len(tuple(index)):
        raise ValueError("one polynomial per category is required")

    def evaluator(theta):
        return tuple(_eval_polynomial(poly, theta) for poly in polys)

    return ParametricModel(tuple(index), box, evaluator, name, polynomial=polys)


def piecewise_polynomial_model(index, lower, upper, pieces, name: str = "piecewise") -> ParametricModel:
    """Polynomial entries that change between sub-boxes of the parameter box.

    ``pieces`` is a list of ``(piece_lower, piece_upper, entries)``; the first
    piece containing ``theta`` is used.
    """
    box = ParamBox(lower, upper)
    parsed = []
    for lo, hi, entries in pieces:
        piece_box = ParamBox(lo, hi)
        polys = tuple(_parse_polynomial(e, box.dimension) for e in entries)
        if len(polys) != len(tuple(index)):
            raise ValueError("one polynomial per category is required")
        parsed.append((piece_box, polys))
    if len(parsed) == 1:
        return polynomial_model(index, lower, upper, pieces[0][2], name)

    def evaluator(theta):
        for piece_box, polys in parsed:
            if piece_box.contains(theta):
                return tuple(_eval_polynomial(poly, theta) for poly in polys)
        raise ValueError(f"no polynomial piece covers {theta!r}")

    return ParametricModel(tuple(index), box, evaluator, name)


def solve_consistency_exact(f: ParametricModel, g: ParametricModel, p, q):
    """Solve ``f_M(theta) = g_M(theta)`` symbolically for polynomial models.

    Returns the finitely many real solutions inside the box (rational ones as
    Fractions, others as floats), or ``None`` when the equations vanish
    identically, i.e. the models are meta-consistent.
    """
    import sympy

    if f.polynomial is None or g.polynomial is None:
        raise ValueError("exact solving needs polynomial models")
    d = f.dimension
    syms = sympy.symbols(f"t0:{d}") if d else ()

    def expr(poly):
        out = sympy.Integer(0)
        for coef, powers in poly:
            term = sympy.Rational(coef.numerator, coef.denominator)
            for s, e in zip(syms, powers):
                term *= s**e
            out += term
        return out

    fx = dict(zip(f.index, (expr(e) for e in f.polynomial)))
    gx = dict(zip(g.index, (expr(e) for e in g.polynomial)))
    equations = []
    for k in p.codomain:
        lhs = sum((fx[i] for i in p.fibers[k]), sympy.Integer(0))
        rhs = sum((gx[j] for j in q.fibers[k]), sympy.Integer(0))
        eq = sympy.expand(lhs - rhs)
        if eq != 0:
            equations.append(eq)
    if not equations:
        return None
    solutions = sympy.solve(equations, list(syms), dict=True)
    out = []
    for sol in solutions:
        if any(s not in sol or sol[s].free_symbols for s in syms):
            raise ValueError("solution set is not finite; use a grid or predicate instead")
        point = []
        for s in syms:
            v = sympy.nsimplify(sol[s])
            if not v.is_real:
                break
            point.append(Fraction(int(v.p), int(v.q)) if v.is_Rational else float(v))
        else:
            if f.box.contains(tuple(point)):
                out.append(tuple(point))
    return out
