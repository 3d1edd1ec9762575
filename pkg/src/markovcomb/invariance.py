"""Finite group actions on categories and invariance of parametric models.

A model ``f`` is invariant under an action of a finite group ``G`` when every
``a`` in ``G`` comes with an injective parameter map ``abar`` such that
``f(theta)[a^-1 . i] == f(abar(theta))[i]`` for all ``theta`` and ``i``.
The maps ``abar`` are supplied by the caller and only verified here.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .core import CategoryMapping, aggregate, mapping_product
from .errors import InvalidAction, NotCompatible
from .parametric.model import CombinedModel, ParametricModel, coerce_theta, evaluate

__all__ = [
    "FiniteAction",
    "ParamTransport",
    "InvarianceReport",
    "make_action",
    "trivial_action",
    "check_invariance",
    "is_compatible",
    "induced_action_on_M",
    "induced_action_on_product",
    "combined_transport",
    "aggregate_equivariance_gap",
]


@dataclass(frozen=True, eq=False)
class FiniteAction:
    """A finite group acting on an ordered category set by permutations.

    ``perms[a]`` maps every category to its image under ``a``;
    ``compose[(a, b)]`` is the element acting as ``a`` after ``b``.
    """

    elements: tuple
    categories: tuple
    perms: dict
    compose: dict
    identity: object

    def act(self, a, i):
        return self.perms[a][i]

    def inverse(self, a):
        for b in self.elements:
            if self.compose[(a, b)] == self.identity:
                return b
        raise InvalidAction(f"element {a!r} has no inverse")

    def to_dict(self) -> dict:
        return {
            "elements": list(self.elements),
            "perms": {a: dict(self.perms[a]) for a in self.elements},
            "compose": {a: {b: self.compose[(a, b)] for b in self.elements} for a in self.elements},
        }


def make_action(
    categories: Sequence,
    perms: Mapping,
    compose: Mapping | None = None,
) -> FiniteAction:
    """Validate a group action given by permutation tables.

    ``compose`` may be a dict keyed by ``(a, b)`` or a nested dict
    ``{a: {b: c}}``; when omitted it is derived from the permutations, which
    requires distinct elements to act differently.
    """
    categories = tuple(categories)
    cats = set(categories)
    elements = tuple(perms)
    if not elements:
        raise InvalidAction("a group needs at least one element")
    table = {}
    for a in elements:
        perm = dict(perms[a])
        if set(perm) != cats or set(perm.values()) != cats:
            raise InvalidAction(f"element {a!r} does not permute the categories")
        table[a] = perm
    identities = [a for a in elements if all(table[a][i] == i for i in categories)]
    if not identities:
        raise InvalidAction("no element acts as the identity")
    if compose is None:
        lookup = {}
        for a in elements:
            key = tuple(table[a][i] for i in categories)
            if key in lookup:
                raise InvalidAction("elements act identically; supply a composition table")
            lookup[key] = a
        comp = {}
        for a in elements:
            for b in elements:
                key = tuple(table[a][table[b][i]] for i in categories)
                if key not in lookup:
                    raise InvalidAction(f"{a!r} after {b!r} is not a group element")
                comp[(a, b)] = lookup[key]
    else:
        comp = {}
        for key, value in compose.items():
            if isinstance(value, Mapping):
                for b, c in value.items():
                    comp[(key, b)] = c
            else:
                comp[tuple(key)] = value
    for a in elements:
        for b in elements:
            c = comp.get((a, b))
            if c not in table:
                raise InvalidAction(f"composition of {a!r} and {b!r} is missing or unknown")
            if any(table[c][i] != table[a][table[b][i]] for i in categories):
                raise InvalidAction(f"composition table disagrees with the permutations at ({a!r}, {b!r})")
    ident = next((e for e in identities if all(comp[(e, b)] == b == comp[(b, e)] for b in elements)), None)
    if ident is None:
        raise InvalidAction("no two-sided identity in the composition table")
    action = FiniteAction(elements, categories, table, comp, ident)
    for a in elements:
        action.inverse(a)
    return action


def trivial_action(categories: Sequence, element="e") -> FiniteAction:
    return make_action(categories, {element: {i: i for i in categories}})


@dataclass(frozen=True)
class ParamTransport:
    """Parameter maps ``abar`` indexed by group element."""

    maps: dict

    def __call__(self, a, theta) -> tuple:
        return coerce_theta(self.maps[a](coerce_theta(theta)))


@dataclass(frozen=True)
class InvarianceReport:
    invariant: bool
    worst_gap: float
    witness: tuple | None
    injective: bool
    checked: int = 0
    notes: tuple = field(default=())

    def __bool__(self):
        return self.invariant and self.injective


def check_invariance(
    f: ParametricModel,
    action: FiniteAction,
    transport: ParamTransport,
    samples=None,
    tol: float = 1e-12,
) -> InvarianceReport:
    """Check ``f(theta)[a^-1 . i] == f(abar(theta))[i]`` at sampled ``theta``.

    Raises :class:`~markovcomb.errors.OutOfBox` when a transported point
    leaves the parameter box.  The report also records whether distinct
    sampled points stay distinct under every ``abar``.
    """
    if set(action.categories) != set(f.index):
        raise InvalidAction("the action does not permute the categories of the model")
    points = f.box.sample() if samples is None else [coerce_theta(t) for t in samples]
    worst, witness, injective = Fraction(0), None, True
    for a in action.elements:
        inv = action.inverse(a)
        images = set()
        for theta in points:
            moved = f.box.check(transport(a, theta))
            images.add(moved)
            lhs, rhs = evaluate(f, theta), evaluate(f, moved)
            for i in f.index:
                gap = abs(lhs[action.act(inv, i)] - rhs[i])
                if gap > worst:
                    worst, witness = gap, (theta, a, i)
        if len(images) < len(set(points)):
            injective = False
    return InvarianceReport(float(worst) <= tol, float(worst), witness, injective, len(points))


def is_compatible(action_i: FiniteAction, action_j: FiniteAction, p: CategoryMapping, q: CategoryMapping) -> bool:
    """``p(i) == q(j)`` implies ``p(a.i) == q(a.j)`` for every group element ``a``."""
    if set(action_i.elements) != set(action_j.elements):
        raise InvalidAction("the two actions use different group elements")
    prod = mapping_product(p, q)
    for a in action_i.elements:
        for _, i, j in prod.triples:
            if p(action_i.act(a, i)) != q(action_j.act(a, j)):
                return False
    return True


def induced_action_on_M(
    action_i: FiniteAction,
    p: CategoryMapping,
    q: CategoryMapping | None = None,
    action_j: FiniteAction | None = None,
) -> FiniteAction:
    """The action ``a . p(i) = p(a . i)`` on the metacategories.

    Well-definedness (``p(a . i)`` constant on every fiber) is verified
    exhaustively; with ``q`` and ``action_j`` given, compatibility is checked
    too.
    """
    if q is not None and action_j is not None and not is_compatible(action_i, action_j, p, q):
        raise NotCompatible("the actions are not compatible with the mappings")
    perms = {}
    for a in action_i.elements:
        perm = {}
        for k in p.codomain:
            images = {p(action_i.act(a, i)) for i in p.fibers[k]}
            if len(images) != 1:
                raise NotCompatible(f"element {a!r} splits the fiber of {k!r}")
            perm[k] = images.pop()
        perms[a] = perm
    return make_action(p.codomain, perms, action_i.compose)


def induced_action_on_product(
    action_i: FiniteAction, action_j: FiniteAction, p: CategoryMapping, q: CategoryMapping
) -> FiniteAction:
    """The action ``a . (i, j) = (a . i, a . j)`` on the mapping product."""
    if not is_compatible(action_i, action_j, p, q):
        raise NotCompatible("the actions are not compatible with the mappings")
    prod = mapping_product(p, q)
    perms = {
        a: {(i, j): (action_i.act(a, i), action_j.act(a, j)) for i, j in prod.pairs}
        for a in action_i.elements
    }
    return make_action(prod.pairs, perms, action_i.compose)


def _split(theta, dims):
    out, at = [], 0
    for d in dims:
        out.append(tuple(theta[at : at + d]))
        at += d
    return out, tuple(theta[at:])


def combined_transport(model: CombinedModel, *transports: ParamTransport) -> ParamTransport:
    """Parameter transport for a combined model built from invariant components.

    The expected transports are, by variant:

    * ``meta_star``, ``restricted_lower``, ``restricted_upper``,
      ``restricted_super``: one transport shared by both components;
    * ``lower``, ``upper``, ``super``: one for ``f`` and one for ``g``
      (a single one is used for both);
    * ``structured_super``: one each for ``f``, ``h`` and ``g``.

    Flags are left unchanged.  For ``super`` the middle block follows ``f``
    when the flag is 0 and ``g`` when it is 1.
    """
    variant = model.variant
    comps = model.components
    if not transports:
        raise ValueError("at least one component transport is required")
    elements = tuple(transports[0].maps)
    if variant in ("meta_star", "restricted_lower"):
        return transports[0]
    if variant in ("lower", "upper", "super"):
        tf, tg = (transports * 2)[:2] if len(transports) == 1 else transports[:2]
    if variant == "lower":
        df, dg = comps[0].dimension, comps[1].dimension

        def build(a):
            def move(theta):
                (t1, t2), _ = _split(theta, (df, dg))
                return tf(a, t1) + tg(a, t2)

            return move

    elif variant == "upper":
        df, dg = comps[0].dimension, comps[1].dimension

        def build(a):
            def move(theta):
                (t1, t2), rest = _split(theta, (df, dg))
                return tf(a, t1) + tg(a, t2) + rest

            return move

    elif variant == "restricted_upper":
        t0 = transports[0]
        d = comps[0].dimension

        def build(a):
            def move(theta):
                (t,), rest = _split(theta, (d,))
                return t0(a, t) + rest

            return move

    elif variant == "super":
        d = comps[0].dimension

        def build(a):
            def move(theta):
                (t1, t2, t3), rest = _split(theta, (d, d, d))
                middle = tf if rest[0] == 0 else tg
                return tf(a, t1) + middle(a, t2) + tg(a, t3) + rest

            return move

    elif variant == "restricted_super":
        t0 = transports[0]
        d = comps[0].dimension

        def build(a):
            def move(theta):
                (t1, t2), rest = _split(theta, (d, d))
                return t0(a, t1) + t0(a, t2) + rest

            return move

    elif variant == "structured_super":
        if len(transports) != 3:
            raise ValueError("structured combinations need transports for f, h and g")
        tf, th, tg = transports
        dims = tuple(c.dimension for c in comps)

        def build(a):
            def move(theta):
                (t1, t2, t3), _ = _split(theta, dims)
                return tf(a, t1) + th(a, t2) + tg(a, t3)

            return move

    else:
        raise ValueError(f"unknown combination variant {variant!r}")
    return ParamTransport({a: build(a) for a in elements})


def aggregate_equivariance_gap(
    f: ParametricModel,
    p: CategoryMapping,
    action: FiniteAction,
    transport: ParamTransport,
    samples=None,
) -> float:
    """Largest ``|f(abar theta)_{M,k} - f(theta)_{M, a^-1 . k}|`` over samples.

    Zero for an invariant model whose action descends to ``M``.
    """
    on_m = induced_action_on_M(action, p)
    points = f.box.sample() if samples is None else [coerce_theta(t) for t in samples]
    worst = Fraction(0)
    for a in action.elements:
        inv = on_m.inverse(a)
        for theta in points:
            moved = aggregate(evaluate(f, transport(a, theta)), p)
            base = aggregate(evaluate(f, theta), p)
            for k in p.codomain:
                worst = max(worst, abs(moved[k] - base[on_m.act(inv, k)]))
    return float(worst)
