"""Command-line front end over JSON files.

Every subcommand prints one JSON document on standard output.  Exit status
is 0 on success, 1 for domain errors (reported as ``{"error": ..., "detail":
...}`` on standard error) and 2 for usage errors or unreadable input.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import combine as cb
from . import copula as cop
from . import mle as ml
from . import sampling as smp
from . import serialization as ser
from . import stagedtree as st
from .core import aggregate, mapping_product
from .errors import MarkovCombinationError
from .invariance import check_invariance
from .parametric import constructions as cons
from .parametric.model import evaluate
from .parametric.variants import mixture, mixture_via_chain

log = logging.getLogger("markovcomb")


class UsageError(Exception):
    """Malformed input or arguments (exit status 2)."""


def _load(path):
    try:
        return ser.load_json(path)
    except FileNotFoundError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"malformed JSON in {path}: {exc}") from None


def _vector(path):
    try:
        return ser.vector_from_json(_load(path))
    except (KeyError, TypeError) as exc:
        raise UsageError(f"{path} is not a vector document: {exc}") from None


def _mapping(path):
    try:
        return ser.mapping_from_json(_load(path))
    except (KeyError, TypeError, AttributeError) as exc:
        raise UsageError(f"{path} is not a mapping document: {exc}") from None


def _emit_dist(d, args):
    if getattr(args, "decimal", False):
        return {
            "index": [ser.category_to_json(c) for c in d.index],
            "entries": [round(float(x), args.digits) for x in d.entries],
        }
    return ser.vector_to_json(d)


def cmd_aggregate(args):
    return ser.vector_to_json(aggregate(_vector(args.vector), _mapping(args.mapping)))


def cmd_product_index(args):
    return ser.product_to_json(mapping_product(_mapping(args.p), _mapping(args.q)))


def cmd_check_consistency(args):
    f, g, p, q = _vector(args.f), _vector(args.g), _mapping(args.p), _mapping(args.q)
    return {
        "consistent": cb.is_consistent(f, g, p, q),
        "aggregate_f": ser.vector_to_json(aggregate(f, p)),
        "aggregate_g": ser.vector_to_json(aggregate(g, q)),
    }


def cmd_combine(args):
    f, g, p, q = _vector(args.f), _vector(args.g), _mapping(args.p), _mapping(args.q)
    strict = not args.permissive
    if args.variant == "left":
        out = cb.left_combine(f, g, p, q, strict=strict)
    elif args.variant == "right":
        out = cb.right_combine(f, g, p, q, strict=strict)
    else:
        out = cb.star(f, g, p, q, strict=strict)
    return ser.vector_to_json(out)


def cmd_project(args):
    prod = mapping_product(_mapping(args.p), _mapping(args.q))
    return ser.vector_to_json(cb.project(_vector(args.vector), prod, args.axis))


def _model(spec, base):
    try:
        return ser.model_from_spec(spec, base)
    except (FileNotFoundError, KeyError) as exc:
        raise UsageError(f"cannot build model {spec!r}: {exc}") from None


def cmd_mixture(args):
    base = Path(args.base)
    f, g = _model(args.f, base), _model(args.g, base)
    build = mixture_via_chain if args.via_chain else mixture
    model = build(f, g)
    theta = ser.parse_theta(args.theta) + (ser.parse_theta(args.lam)[0],)
    return _emit_dist(evaluate(model, theta), args)


def cmd_copula(args):
    if args.action == "validate":
        C = ser.copula_from_json(_load(args.files[0]))
        check = cop.validate_copula(C)
        return {"valid": check.valid, "condition": check.condition, "where": check.where}
    if args.action == "density":
        C = ser.copula_from_json(_load(args.files[0]))
        return ser.vector_to_json(cop.density_from_copula(C))
    if args.action == "product":
        if len(args.files) != 2:
            raise UsageError("copula product needs two copula files")
        C1, C2 = (ser.copula_from_json(_load(path)) for path in args.files)
        return ser.copula_to_json(cop.product_copula(C1, C2))
    raise UsageError(f"unknown copula action {args.action!r}")


def _tree(path):
    try:
        return ser.tree_from_json(_load(path))
    except (KeyError, TypeError) as exc:
        raise UsageError(f"{path} is not a tree document: {exc}") from None


def cmd_stagedtree(args):
    T = _tree(args.tree)
    if args.action == "validate":
        check = st.validate_staged(T)
        return {"valid": check.valid, "violation": list(check.violation) if check.violation else None}
    if args.action == "model":
        model = st.tree_model(T)
        out = {"stages": [list(s) for s in st.tree_stages(T)], "dimension": model.dimension}
        if args.theta is not None:
            out["paths"] = _emit_dist(evaluate(model, ser.parse_theta(args.theta)), args)
        return out
    if args.action == "combine":
        if not (args.other and args.cut and args.other_cut and args.phi):
            raise UsageError("stagedtree combine needs --other, --cut, --other-cut and --phi")
        T2 = _tree(args.other)
        dec = st.decompose(T, args.cut.split(","))
        dec2 = st.decompose(T2, args.other_cut.split(","))
        phi = json.loads(args.phi) if args.phi.lstrip().startswith("{") else _load(args.phi)
        res = st.staged_combine(T, dec, T2, dec2, phi, mode=args.mode)
        return {
            "tree": ser.tree_to_json(res.tree),
            "pairs": {leaf: list(pair) for leaf, pair in res.pairs.items()},
        }
    raise UsageError(f"unknown stagedtree action {args.action!r}")


def cmd_mle(args):
    x, p, q = _vector(args.data), _mapping(args.mapping_i), _mapping(args.mapping_j)
    out = {"mle": ser.vector_to_json(ml.mle(x, p, q))}
    if args.emit_horn:
        hp = ml.build_horn_pair(p, q)
        out["horn"] = ser.horn_to_json(hp)
        if all(v > 0 for v in x.entries):
            out["horn_identity"] = ml.verify_horn_identity(hp, x, p, q)
    return out


def cmd_invariance(args):
    model = _model(args.model, Path(args.base))
    action = ser.action_from_json(_load(args.action))
    transport = ser.transport_from_json(_load(args.transport))
    report = check_invariance(model, action, transport, tol=args.tol)
    return {
        "invariant": report.invariant,
        "injective": report.injective,
        "worst_gap": report.worst_gap,
        "checked": report.checked,
    }


def cmd_sample(args):
    rng = smp.make_rng(args.seed)
    if args.dist is not None:
        draws = smp.sample_dist(_vector(args.dist).to_dist(), rng, args.n)
    else:
        if not (args.f and args.g and args.p and args.q):
            raise UsageError("sampling a combination needs --f, --g, --p and --q")
        base = Path(args.base)
        f, g = _model(args.f, base), _model(args.g, base)
        p, q = _mapping(args.p), _mapping(args.q)
        if args.h is None:
            draws = smp.sample_meta_star(f, g, p, q, ser.parse_theta(args.theta), rng, args.n)
        else:
            h = _model(args.h, base)
            draws = smp.sample_structured_super(
                f, h, g, p, q,
                ser.parse_theta(args.theta1), ser.parse_theta(args.theta2), ser.parse_theta(args.theta3),
                rng, args.n,
            )
    if args.out:
        smp.write_draws(draws, args.out)
        return {"draws": len(draws), "out": args.out, "seed": args.seed}
    return {"draws": [ser.category_to_json(c) for c in draws], "seed": args.seed}


def cmd_dim(args):
    p, q = _mapping(args.p), _mapping(args.q)
    model_dim, ambient = cons.expfam_combination_dim(p, q)
    out = {"model_dimension": model_dim, "ambient_dimension": ambient}
    if args.jacobian:
        from .parametric.variants import meta_star

        f, g = cons.consistent_saturated_pair(p, q)
        combined = meta_star(f, g, p, q)
        point = f.box.sample(2)[1]
        out["jacobian_rank"] = cons.jacobian_rank(combined, point)
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="markovcomb", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log diagnostics to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def numeric_flags(sp):
        sp.add_argument("--decimal", action="store_true", help="emit decimals instead of exact rationals")
        sp.add_argument("--digits", type=int, default=12)

    sp = sub.add_parser("aggregate", help="aggregate a vector along a mapping")
    sp.add_argument("vector")
    sp.add_argument("mapping")
    sp.set_defaults(run=cmd_aggregate)

    sp = sub.add_parser("product-index", help="list the mapping product")
    sp.add_argument("p")
    sp.add_argument("q")
    sp.set_defaults(run=cmd_product_index)

    sp = sub.add_parser("check-consistency", help="compare the aggregates of two vectors")
    for name in ("f", "g", "p", "q"):
        sp.add_argument(name)
    sp.set_defaults(run=cmd_check_consistency)

    sp = sub.add_parser("combine", help="Markov combination of two vectors")
    for name in ("f", "g", "p", "q"):
        sp.add_argument(name)
    sp.add_argument("--variant", choices=("left", "right", "star"), default="star")
    sp.add_argument("--permissive", action="store_true", help="zero out blocks with zero aggregate")
    sp.set_defaults(run=cmd_combine)

    sp = sub.add_parser("project", help="aggregate a combined vector onto I or J")
    sp.add_argument("vector")
    sp.add_argument("p")
    sp.add_argument("q")
    sp.add_argument("--axis", choices=("I", "J"), default="I")
    sp.set_defaults(run=cmd_project)

    sp = sub.add_parser("mixture", help="evaluate the binary mixture of two models")
    sp.add_argument("--f", required=True)
    sp.add_argument("--g", required=True)
    sp.add_argument("--theta", default="")
    sp.add_argument("--lam", required=True)
    sp.add_argument("--via-chain", action="store_true")
    sp.add_argument("--base", default=".", help="directory for relative model files")
    numeric_flags(sp)
    sp.set_defaults(run=cmd_mixture)

    sp = sub.add_parser("copula", help="validate, multiply or differentiate discrete copulas")
    sp.add_argument("action", choices=("validate", "product", "density"))
    sp.add_argument("files", nargs="+")
    sp.set_defaults(run=cmd_copula)

    sp = sub.add_parser("stagedtree", help="staged tree operations")
    sp.add_argument("action", choices=("validate", "model", "combine"))
    sp.add_argument("tree")
    sp.add_argument("--theta")
    sp.add_argument("--other")
    sp.add_argument("--cut")
    sp.add_argument("--other-cut")
    sp.add_argument("--phi", help="JSON object or file mapping cut vertices")
    sp.add_argument("--mode", choices=("symbolic", "numeric"), default="symbolic")
    numeric_flags(sp)
    sp.set_defaults(run=cmd_stagedtree)

    sp = sub.add_parser("mle", help="closed-form MLE for combined saturated models")
    sp.add_argument("--data", required=True)
    sp.add_argument("--mapping-i", required=True)
    sp.add_argument("--mapping-j", required=True)
    sp.add_argument("--emit-horn", action="store_true")
    sp.set_defaults(run=cmd_mle)

    sp = sub.add_parser("invariance", help="check invariance of a model under a group action")
    sp.add_argument("--model", required=True)
    sp.add_argument("--action", required=True)
    sp.add_argument("--transport", required=True)
    sp.add_argument("--tol", type=float, default=1e-12)
    sp.add_argument("--base", default=".")
    sp.set_defaults(run=cmd_invariance)

    sp = sub.add_parser("sample", help="seeded draws from a distribution or combination")
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--n", type=int, default=1)
    sp.add_argument("--out")
    sp.add_argument("--dist", help="vector file to sample from directly")
    sp.add_argument("--f")
    sp.add_argument("--g")
    sp.add_argument("--h", help="model on M; switches to the structured super sampler")
    sp.add_argument("--p")
    sp.add_argument("--q")
    sp.add_argument("--theta", default="")
    sp.add_argument("--theta1", default="")
    sp.add_argument("--theta2", default="")
    sp.add_argument("--theta3", default="")
    sp.add_argument("--base", default=".")
    sp.set_defaults(run=cmd_sample)

    sp = sub.add_parser("dim", help="dimension of the combined saturated model")
    sp.add_argument("p")
    sp.add_argument("q")
    sp.add_argument("--jacobian", action="store_true", help="also report the numeric Jacobian rank")
    sp.set_defaults(run=cmd_dim)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, stream=sys.stderr)
    try:
        result = args.run(args)
    except UsageError as exc:
        print(json.dumps({"error": "usage", "detail": str(exc)}), file=sys.stderr)
        return 2
    except MarkovCombinationError as exc:
        print(json.dumps(exc.to_json(), ensure_ascii=False), file=sys.stderr)
        return 1
    except (ValueError, TypeError, KeyError) as exc:
        print(json.dumps({"error": type(exc).__name__, "detail": str(exc)}), file=sys.stderr)
        return 1
    print(ser.dumps(result))
    return 0


if __name__ == "__main__":
    sys.exit(main())
