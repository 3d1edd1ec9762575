"""Parameter boxes, black-box parametric models and their evaluation."""

from __future__ import annotations

import logging
import math
import numbers
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np
from scipy.stats import qmc

from ..core import CategoryMapping, Dist, IndexedVector, ProductIndex, aggregate, as_fraction
from ..errors import NotADistribution, OutOfBox

log = logging.getLogger(__name__)

TAU_NORM = 1e-9
TAU_NEG = 1e-12
CONSISTENCY_TOL = 1e-9
SNAP_MAX_DENOMINATOR = 10**12
DEFAULT_SAMPLE_SIZE = 64

__all__ = [
    "TAU_NORM",
    "TAU_NEG",
    "CONSISTENCY_TOL",
    "SNAP_MAX_DENOMINATOR",
    "ParamBox",
    "ParametricModel",
    "CombinedModel",
    "ConsistencyReport",
    "coerce_theta",
    "snap",
    "evaluate",
    "evaluate_with_error",
    "aggregate_gap",
    "is_meta_consistent",
    "aggregate_model",
    "reparametrize",
    "constant_model",
]


def _bound(x):
    if isinstance(x, float):
        if not math.isfinite(x):
            raise ValueError("parameter bounds must be finite")
        return Fraction(x)
    return as_fraction(x)


def coerce_theta(theta) -> tuple:
    """Normalize a parameter point to a tuple; strings become Fractions."""
    if isinstance(theta, (numbers.Number, str)):
        theta = (theta,)
    out = []
    for t in theta:
        if isinstance(t, str):
            out.append(Fraction(t))
        elif isinstance(t, (bool, np.bool_)):
            raise TypeError("boolean parameter values are not allowed")
        elif isinstance(t, numbers.Integral):
            out.append(Fraction(int(t)))
        elif isinstance(t, np.floating):
            out.append(float(t))
        else:
            out.append(t)
    return tuple(out)


@dataclass(frozen=True)
class ParamBox:
    """An axis-aligned parameter box.

    ``integer`` lists coordinates restricted to integers (the binary flag of
    the upper and super combinations).  Each entry of ``simplex_groups`` is a
    set of coordinates constrained to sum to at most 1, which is how the free
    coordinates of a probability simplex are represented.
    """

    lower: tuple = ()
    upper: tuple = ()
    integer: frozenset = frozenset()
    simplex_groups: tuple = ()

    def __post_init__(self):
        lower = tuple(_bound(x) for x in self.lower)
        upper = tuple(_bound(x) for x in self.upper)
        if len(lower) != len(upper):
            raise ValueError("lower and upper bounds differ in length")
        for n, (lo, hi) in enumerate(zip(lower, upper)):
            if lo > hi:
                raise ValueError(f"empty interval in coordinate {n}: [{lo}, {hi}]")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        object.__setattr__(self, "integer", frozenset(self.integer))
        object.__setattr__(self, "simplex_groups", tuple(tuple(g) for g in self.simplex_groups))

    @classmethod
    def unit_cube(cls, d: int) -> "ParamBox":
        return cls((0,) * d, (1,) * d)

    @classmethod
    def simplex(cls, d: int) -> "ParamBox":
        """Free coordinates of the standard simplex of dimension ``d``."""
        return cls((0,) * d, (1,) * d, simplex_groups=((tuple(range(d)),) if d > 1 else ()))

    @classmethod
    def flag(cls) -> "ParamBox":
        return cls((0,), (1,), integer={0})

    @property
    def dimension(self) -> int:
        return len(self.lower)

    def __add__(self, other: "ParamBox") -> "ParamBox":
        """Cartesian product, coordinates of ``other`` appended."""
        if not isinstance(other, ParamBox):
            return NotImplemented
        d = self.dimension
        return ParamBox(
            self.lower + other.lower,
            self.upper + other.upper,
            self.integer | {d + n for n in other.integer},
            self.simplex_groups + tuple(tuple(d + n for n in g) for g in other.simplex_groups),
        )

    def power(self, k: int) -> "ParamBox":
        out = ParamBox()
        for _ in range(k):
            out = out + self
        return out

    def contains(self, theta) -> bool:
        theta = coerce_theta(theta)
        if len(theta) != self.dimension:
            return False
        for n, (t, lo, hi) in enumerate(zip(theta, self.lower, self.upper)):
            if not (lo <= t <= hi):
                return False
            if n in self.integer and t != int(t):
                return False
        for g in self.simplex_groups:
            if sum(theta[n] for n in g) > 1:
                return False
        return True

    def check(self, theta) -> tuple:
        theta = coerce_theta(theta)
        if not self.contains(theta):
            raise OutOfBox(f"parameter {theta!r} lies outside the parameter box", theta=theta)
        return theta

    def sample(self, n: int = DEFAULT_SAMPLE_SIZE) -> list[tuple]:
        """Deterministic low-discrepancy interior points.

        Unscrambled Sobol points shifted by half a cell are exact dyadic
        rationals, so models that accept Fractions are evaluated exactly.
        Simplex groups are filled by normalizing with one extra Sobol
        coordinate per group, which keeps every point strictly interior.
        """
        d = self.dimension
        if d == 0:
            return [()]
        dims = d + len(self.simplex_groups)
        m = max(1, math.ceil(math.log2(max(n, 2))))
        raw = qmc.Sobol(dims, scramble=False).random_base2(m)[:n]
        shift = Fraction(1, 2 * (1 << m))
        grouped = {c: gi for gi, g in enumerate(self.simplex_groups) for c in g}
        points = []
        for row in raw:
            u = [Fraction(float(x)) + shift for x in row]
            theta = [None] * d
            for gi, g in enumerate(self.simplex_groups):
                extra = u[d + gi]
                denom = extra + sum(u[c] for c in g)
                for c in g:
                    theta[c] = self.lower[c] + (self.upper[c] - self.lower[c]) * u[c] / denom
            for c in range(d):
                if c in grouped:
                    continue
                lo, hi = self.lower[c], self.upper[c]
                if c in self.integer:
                    span = int(hi - lo) + 1
                    theta[c] = lo + min(span - 1, int(u[c] * span))
                else:
                    theta[c] = lo + (hi - lo) * u[c]
            points.append(tuple(theta))
        return points


@dataclass(frozen=True, eq=False)
class ParametricModel:
    """A black-box parametric model over a category set.

    ``evaluator`` maps a parameter tuple to one value per category (ints,
    Fractions or floats).  Evaluation through :func:`evaluate` validates the
    output and returns an exact :class:`~markovcomb.core.Dist`.
    """

    index: tuple
    box: ParamBox
    evaluator: Callable[[tuple], Sequence]
    name: str = ""
    polynomial: tuple | None = None

    @property
    def dimension(self) -> int:
        return self.box.dimension

    def __call__(self, theta) -> Dist:
        return evaluate(self, theta)

    def __repr__(self):
        label = self.name or "model"
        return f"<{type(self).__name__} {label} on {len(self.index)} categories, dim {self.dimension}>"


@dataclass(frozen=True, eq=False)
class CombinedModel(ParametricModel):
    """A model produced by one of the combination variants.

    ``components`` are the input models in parameter order, ``mappings`` the
    category mappings and ``product`` the mapping product indexing the result.
    ``parameter_set`` is the finite admissible set of a grid-restricted
    combination, when one was computed.
    """

    variant: str = ""
    components: tuple = ()
    mappings: tuple = ()
    product: ProductIndex | None = None
    parameter_set: tuple | None = None
    admits: Callable | None = field(default=None, repr=False)


def _snap_value(x) -> tuple[Fraction, float]:
    if isinstance(x, Fraction):
        return x, 0.0
    if isinstance(x, numbers.Integral) and not isinstance(x, bool):
        return Fraction(int(x)), 0.0
    if isinstance(x, numbers.Rational):
        return Fraction(int(x.numerator), int(x.denominator)), 0.0
    xf = float(x)
    if not math.isfinite(xf):
        raise NotADistribution(f"non-finite model value {x!r}")
    q = Fraction(xf).limit_denominator(SNAP_MAX_DENOMINATOR)
    return q, abs(float(q) - xf)


def snap(index, values) -> tuple[Dist, float]:
    """Turn raw model output into an exact distribution.

    Floats are rounded to the nearest fraction with denominator at most
    ``10**12``; exact inputs are kept.  Entries down to ``-TAU_NEG`` are
    clipped to zero, the sum must lie within ``TAU_NORM`` of 1, and the
    result is renormalized exactly.  Returns the distribution and the largest
    absolute change made to any entry.
    """
    values = list(values)
    if len(values) != len(index):
        raise NotADistribution(
            f"model returned {len(values)} values for {len(index)} categories"
        )
    snapped, err = [], 0.0
    for x in values:
        q, e = _snap_value(x)
        if q < 0:
            if q < -Fraction(TAU_NEG):
                raise NotADistribution(f"model value {x!r} is negative")
            e = max(e, abs(float(x)))
            q = Fraction(0)
        snapped.append(q)
        err = max(err, e)
    total = sum(snapped, Fraction(0))
    if abs(total - 1) > TAU_NORM:
        raise NotADistribution(f"model values sum to {float(total)!r}, not 1")
    if total != 1:
        snapped = [x / total for x in snapped]
        err = max(err, max(abs(float(a) - float(b)) for a, b in zip(snapped, values)))
    return Dist(index, snapped), err


def evaluate_with_error(model: ParametricModel, theta) -> tuple[Dist, float]:
    theta = model.box.check(theta)
    dist, err = snap(model.index, model.evaluator(theta))
    if err:
        log.debug("snapped %s at %r with error %.3g", model.name or "model", theta, err)
    return dist, err


def evaluate(model: ParametricModel, theta) -> Dist:
    """Evaluate a model at ``theta`` and return an exact distribution."""
    return evaluate_with_error(model, theta)[0]


def constant_model(d: Dist, name: str = "") -> ParametricModel:
    """The zero-dimensional model whose only value is ``d``."""
    entries = d.entries
    return ParametricModel(d.index, ParamBox(), lambda theta: entries, name or "constant")


def reparametrize(model: ParametricModel, box: ParamBox, select: Callable[[tuple], tuple], name=None):
    """Pull a model back along ``select: box -> model.box``."""

    def evaluator(theta):
        return evaluate(model, select(theta)).entries

    return ParametricModel(model.index, box, evaluator, name or model.name)


def aggregate_model(f: ParametricModel, p: CategoryMapping) -> ParametricModel:
    """The aggregate model ``theta -> f(theta)_M``."""
    if set(f.index) != set(p.domain):
        raise ValueError("model index does not match the mapping domain")

    def evaluator(theta):
        return aggregate(evaluate(f, theta), p).entries

    return ParametricModel(p.codomain, f.box, evaluator, f"{f.name}_M" if f.name else "")


def aggregate_gap(f: IndexedVector, g: IndexedVector, p: CategoryMapping, q: CategoryMapping) -> Fraction:
    """Largest absolute difference between the aggregates of ``f`` and ``g``."""
    fm, gm = aggregate(f, p), aggregate(g, q)
    return max((abs(fm[k] - gm[k]) for k in p.codomain), default=Fraction(0))


@dataclass(frozen=True)
class ConsistencyReport:
    consistent: bool
    worst_theta: tuple | None
    worst_gap: float
    checked: int

    def __bool__(self):
        return self.consistent


def is_meta_consistent(
    f: ParametricModel,
    g: ParametricModel,
    p: CategoryMapping,
    q: CategoryMapping,
    points=None,
    tol: float = CONSISTENCY_TOL,
) -> ConsistencyReport:
    """Check ``f(theta)_M == g(theta)_M`` at sampled parameters.

    The report is truthy when the largest aggregate gap over the sample is at
    most ``tol``; it carries the parameter point where the gap is worst.
    """
    if f.box != g.box:
        raise ValueError("meta-consistency needs both models on the same parameter box")
    if set(p.codomain) != set(q.codomain):
        return ConsistencyReport(False, None, math.inf, 0)
    points = f.box.sample() if points is None else [coerce_theta(t) for t in points]
    worst_theta, worst = None, -1.0
    for theta in points:
        gap = float(aggregate_gap(evaluate(f, theta), evaluate(g, theta), p, q))
        if gap > worst:
            worst_theta, worst = theta, gap
    return ConsistencyReport(worst <= tol, worst_theta, max(worst, 0.0), len(points))
