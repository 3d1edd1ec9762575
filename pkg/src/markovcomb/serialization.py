"""JSON encodings for mappings, vectors, copulas, trees, actions and models.

Rationals are written as ``"num/den"`` strings.  Categories are strings;
pair categories of mapping products are written as JSON arrays and read back
as tuples, so every document round-trips to an equal value.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any

from .core import CategoryMapping, IndexedVector, ProductIndex, as_fraction, make_mapping
from .copula import DiscreteCopula
from .invariance import FiniteAction, ParamTransport, make_action
from .mle import HornPair
from .parametric import constructions as cons
from .parametric.model import ParametricModel
from .stagedtree import Edge, StagedTree

__all__ = [
    "rational_to_json",
    "category_to_json",
    "category_from_json",
    "mapping_to_json",
    "mapping_from_json",
    "vector_to_json",
    "vector_from_json",
    "product_to_json",
    "copula_to_json",
    "copula_from_json",
    "tree_to_json",
    "tree_from_json",
    "action_to_json",
    "action_from_json",
    "transport_from_json",
    "horn_to_json",
    "model_from_json",
    "model_from_spec",
    "parse_theta",
    "load_json",
    "dumps",
]


def rational_to_json(x) -> str:
    x = as_fraction(x)
    return f"{x.numerator}/{x.denominator}"


def category_to_json(c):
    return [category_to_json(x) for x in c] if isinstance(c, tuple) else c


def category_from_json(c):
    return tuple(category_from_json(x) for x in c) if isinstance(c, list) else c


def mapping_to_json(p: CategoryMapping) -> dict:
    """``{"domain": [...], "map": {...}, "codomain": [...]}``.

    When the domain holds pair categories, ``map`` is a list of
    ``[category, metacategory]`` entries instead of an object.
    """
    if all(isinstance(i, str) for i in p.domain):
        table: Any = {i: category_to_json(k) for i, k in zip(p.domain, p.images)}
    else:
        table = [[category_to_json(i), category_to_json(k)] for i, k in zip(p.domain, p.images)]
    return {
        "domain": [category_to_json(i) for i in p.domain],
        "map": table,
        "codomain": [category_to_json(k) for k in p.codomain],
    }


def mapping_from_json(doc: dict) -> CategoryMapping:
    domain = [category_from_json(i) for i in doc["domain"]]
    table = doc["map"]
    if isinstance(table, dict):
        assignment = [(i, category_from_json(k)) for i, k in table.items()]
    else:
        assignment = [(category_from_json(i), category_from_json(k)) for i, k in table]
    codomain = doc.get("codomain")
    if codomain is not None:
        codomain = [category_from_json(k) for k in codomain]
    return make_mapping(domain, assignment, codomain)


def vector_to_json(v: IndexedVector) -> dict:
    return {
        "index": [category_to_json(c) for c in v.index],
        "entries": [rational_to_json(x) for x in v.entries],
    }


def vector_from_json(doc: dict) -> IndexedVector:
    """A :class:`Dist` when the entries form a distribution, else a plain vector."""
    index = [category_from_json(c) for c in doc["index"]]
    entries = doc["entries"]
    if any(isinstance(x, float) for x in entries):
        raise TypeError("vector entries must be rational strings or integers, not floats")
    v = IndexedVector(index, entries)
    return v.to_dist() if v.is_dist() else v


def product_to_json(prod: ProductIndex) -> dict:
    return {"triples": [[category_to_json(x) for x in t] for t in prod.triples]}


def copula_to_json(C: DiscreteCopula) -> dict:
    return {"n": C.n, "m": C.m, "values": [[rational_to_json(x) for x in row] for row in C.values]}


def copula_from_json(doc: dict) -> DiscreteCopula:
    return DiscreteCopula(int(doc["n"]), int(doc["m"]), doc["values"])


def tree_to_json(T: StagedTree) -> dict:
    return T.to_dict()


def tree_from_json(doc: dict) -> StagedTree:
    edges = tuple(Edge(e["from"], e["to"], e["label"]) for e in doc["edges"])
    return StagedTree(tuple(doc["vertices"]), edges, doc["root"])


def action_to_json(a: FiniteAction) -> dict:
    return a.to_dict()


def action_from_json(doc: dict) -> FiniteAction:
    perms = doc["perms"]
    elements = doc.get("elements", list(perms))
    categories = doc.get("categories") or list(perms[elements[0]])
    return make_action(categories, {a: perms[a] for a in elements}, doc.get("compose"))


def transport_from_json(doc: dict) -> ParamTransport:
    """Affine parameter maps ``theta -> A theta + b`` per group element.

    ``{"e": {"matrix": [["1"]], "offset": ["0"]}, "t": {...}}``
    """

    def affine(spec):
        A = [[as_fraction(x) for x in row] for row in spec["matrix"]]
        b = [as_fraction(x) for x in spec.get("offset", ["0"] * len(A))]

        def move(theta):
            return tuple(sum((a * t for a, t in zip(row, theta)), Fraction(0)) + c for row, c in zip(A, b))

        return move

    return ParamTransport({a: affine(spec) for a, spec in doc.items()})


def horn_to_json(hp: HornPair) -> dict:
    return {
        "H": [list(row) for row in hp.H],
        "lambda": list(hp.lam),
        "rows": [[category_to_json(x) for x in lab] for lab in hp.row_labels],
        "columns": [category_to_json(c) for c in hp.columns],
    }


def model_from_json(doc: dict) -> ParametricModel:
    """Polynomial model tables.

    ``{"index": [...], "lower": [...], "upper": [...], "entries": [poly, ...]}``
    with each polynomial a list of ``{"coef": "3", "powers": [1]}`` terms, or
    ``"pieces": [{"lower":, "upper":, "entries":}, ...]`` for a piecewise
    model.
    """
    index = [category_from_json(c) for c in doc["index"]]
    name = doc.get("name", "polynomial")
    if "pieces" in doc:
        pieces = [(pc["lower"], pc["upper"], pc["entries"]) for pc in doc["pieces"]]
        return cons.piecewise_polynomial_model(index, doc["lower"], doc["upper"], pieces, name)
    return cons.polynomial_model(index, doc["lower"], doc["upper"], doc["entries"], name)


def model_from_spec(spec: str, base: Path | None = None) -> ParametricModel:
    """Build a model from a registry string.

    ``saturated:a,b,c`` (or ``saturated:4`` for categories ``0..3``),
    ``binomial:n``, ``lifted:<mapping.json>:<spec of h>``, ``poly:<file.json>``
    or a bare path to a polynomial model file.
    """
    base = Path(".") if base is None else base
    kind, _, rest = spec.partition(":")
    if kind == "saturated":
        cats = rest.split(",") if "," in rest or not rest.isdigit() else [str(i) for i in range(int(rest))]
        return cons.saturated(cats)
    if kind == "binomial":
        return cons.binomial(int(rest))
    if kind == "lifted":
        mapping_path, _, h_spec = rest.partition(":")
        p = mapping_from_json(load_json(base / mapping_path))
        return cons.model_lift(p, model_from_spec(h_spec, base))
    if kind == "poly":
        return model_from_json(load_json(base / rest))
    if spec.endswith(".json"):
        return model_from_json(load_json(base / spec))
    raise ValueError(f"unknown model string {spec!r}")


def parse_theta(text: str | None) -> tuple:
    """``"1/8,1/4"`` -> ``(Fraction(1, 8), Fraction(1, 4))``; empty -> ``()``."""
    if text is None or not text.strip():
        return ()
    return tuple(Fraction(t.strip()) for t in text.split(","))


def load_json(path) -> Any:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def dumps(doc) -> str:
    return json.dumps(doc, ensure_ascii=False, indent=None, separators=(", ", ": "))
