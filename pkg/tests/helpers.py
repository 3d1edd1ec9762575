"""Shared fixtures, random generators and brute-force oracles for the tests."""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

from markovcomb.combine import induced_mapping, star
from markovcomb.core import Dist, make_mapping, mapping_product
from markovcomb.invariance import ParamTransport, make_action
from markovcomb.parametric import polynomial_model

CLUB, DIAMOND, HEART, SPADE = "♣", "♦", "♥", "♠"
SUITS = (CLUB, DIAMOND, HEART, SPADE)


def example_mappings():
    """``a -> 1, b, c -> 2`` and ``three suits -> 1, spade -> 2``."""
    p = make_mapping("abc", {"a": "1", "b": "2", "c": "2"})
    q = make_mapping(SUITS, {CLUB: "1", DIAMOND: "1", HEART: "1", SPADE: "2"})
    return p, q


def F(*args):
    return Fraction(*args)


def linear_model(index, hi, coeffs, name="model"):
    """One-parameter model with entries ``a + b * t`` on ``[0, hi]``."""
    entries = [[(str(a), [0]), (str(b), [1])] for a, b in coeffs]
    return polynomial_model(index, [0], [hi], entries, name)


def example_models():
    """``(3t, t, 1-4t)``, ``(t, t, t, 1-3t)`` and ``(1-4t, 2t, 2t)`` on ``[0, 1/4]``."""
    f = linear_model("abc", "1/4", [(0, 3), (0, 1), (1, -4)], "f")
    g = linear_model(SUITS, "1/4", [(0, 1), (0, 1), (0, 1), (1, -3)], "g")
    f2 = linear_model("abc", "1/4", [(1, -4), (0, 2), (0, 2)], "f2")
    return f, g, f2


def random_weights(rng: random.Random, n: int, zero_prob: float = 0.0, hi: int = 20) -> list[Fraction]:
    """Random non-negative rational probability vector with at least one positive entry."""
    w = [0 if rng.random() < zero_prob else rng.randint(1, hi) for _ in range(n)]
    if not any(w):
        w[rng.randrange(n)] = 1
    total = sum(w)
    return [Fraction(x, total) for x in w]


def random_dist(rng, index, zero_prob=0.0) -> Dist:
    return Dist(index, random_weights(rng, len(index), zero_prob))


def random_mapping(rng, domain, m):
    """Random surjection of ``domain`` onto ``m`` metacategories ``"k0", ...``."""
    domain = tuple(domain)
    m = min(m, len(domain))
    images = [f"k{t}" for t in range(m)] + [f"k{rng.randrange(m)}" for _ in range(len(domain) - m)]
    rng.shuffle(images)
    return make_mapping(domain, dict(zip(domain, images)), [f"k{t}" for t in range(m)])


def random_consistent_pair(rng, max_size=8, zero_prob=0.0):
    """Random ``(f, g, p, q)`` with equal aggregates and no zero aggregate."""
    m = rng.randint(1, max_size)
    I = [f"i{n}" for n in range(rng.randint(m, max_size))]
    J = [f"j{n}" for n in range(rng.randint(m, max_size))]
    p, q = random_mapping(rng, I, m), random_mapping(rng, J, m)
    h = random_weights(rng, m)
    f_vals, g_vals = {}, {}
    for k, hk in zip(p.codomain, h):
        for vals, mp in ((f_vals, p), (g_vals, q)):
            fib = mp.fibers[k]
            for c, w in zip(fib, random_weights(rng, len(fib), zero_prob)):
                vals[c] = hk * w
    return Dist(I, [f_vals[i] for i in I]), Dist(J, [g_vals[j] for j in J]), p, q


def brute_combine(f, g, p, q, divide_by="f"):
    """Direct formula over all of ``I x J`` filtered by ``p(i) == q(j)``."""
    out = {}
    for i, j in itertools.product(f.index, g.index):
        if p(i) != q(j):
            continue
        if divide_by == "f":
            denom = sum(f[a] for a in f.index if p(a) == p(i))
        else:
            denom = sum(g[b] for b in g.index if q(b) == q(j))
        out[(i, j)] = f[i] * g[j] / denom
    return out


def random_triple(rng, max_cells=3, extra=2):
    """Pairwise consistent ``f, g, h`` with mappings through ``M1``, ``M2``, ``M3``.

    Every category is assigned a cell ``(m1, m2, m3)``; ``I`` maps to
    ``(m1, m3)``, ``J`` to ``(m1, m2)`` and ``K`` to ``(m2, m3)``.  The three
    vectors are the margins of a random positive law on the triples whose
    coordinates agree on every shared metacategory, hence pairwise consistent.
    """
    n_cells = rng.randint(1, max_cells)
    space = [(a, b, c) for a in range(2) for b in range(2) for c in range(2)]
    cells = rng.sample(space, n_cells)

    def assign(prefix):
        cats = [f"{prefix}{n}" for n in range(n_cells + rng.randint(0, extra))]
        cell_of = {c: cells[n] if n < n_cells else rng.choice(cells) for n, c in enumerate(cats)}
        return cats, cell_of

    I, ci = assign("i")
    J, cj = assign("j")
    K, ck = assign("k")
    m1 = sorted({c[0] for c in cells})
    m2 = sorted({c[1] for c in cells})
    m3 = sorted({c[2] for c in cells})
    name = lambda tag, v: f"{tag}{v}"
    p1 = make_mapping(I, {i: name("a", ci[i][0]) for i in I}, [name("a", v) for v in m1])
    p3 = make_mapping(I, {i: name("c", ci[i][2]) for i in I}, [name("c", v) for v in m3])
    q1 = make_mapping(J, {j: name("a", cj[j][0]) for j in J}, [name("a", v) for v in m1])
    q2 = make_mapping(J, {j: name("b", cj[j][1]) for j in J}, [name("b", v) for v in m2])
    r2 = make_mapping(K, {k: name("b", ck[k][1]) for k in K}, [name("b", v) for v in m2])
    r3 = make_mapping(K, {k: name("c", ck[k][2]) for k in K}, [name("c", v) for v in m3])
    valid = [
        (i, j, k) for i in I for j in J for k in K
        if p1(i) == q1(j) and q2(j) == r2(k) and r3(k) == p3(i)
    ]
    weights = random_weights(rng, len(valid))
    f = {i: Fraction(0) for i in I}
    g = {j: Fraction(0) for j in J}
    h = {k: Fraction(0) for k in K}
    for (i, j, k), w in zip(valid, weights):
        f[i] += w
        g[j] += w
        h[k] += w
    maps = dict(p1=p1, p3=p3, q1=q1, q2=q2, r2=r2, r3=r3)
    return Dist(I, [f[i] for i in I]), Dist(J, [g[j] for j in J]), Dist(K, [h[k] for k in K]), maps


def six_expressions(f, g, h, maps):
    """All six iterated combinations as dicts keyed by ``(i, j, k)``."""
    p1, p3, q1, q2, r2, r3 = (maps[n] for n in ("p1", "p3", "q1", "q2", "r2", "r3"))
    fg, prod_fg = star(f, g, p1, q1), mapping_product(p1, q1)
    fh, prod_fh = star(f, h, p3, r3), mapping_product(p3, r3)
    gh, prod_gh = star(g, h, q2, r2), mapping_product(q2, r2)
    hg, prod_hg = star(h, g, r2, q2), mapping_product(r2, q2)

    def flat(v, order):
        return {order(c): x for c, x in v.items() if x != 0}

    return {
        "(fg)3h": flat(star(fg, h, induced_mapping(prod_fg, "I", p3), r3), lambda c: (c[0][0], c[0][1], c[1])),
        "(fh)1g": flat(star(fh, g, induced_mapping(prod_fh, "I", p1), q1), lambda c: (c[0][0], c[1], c[0][1])),
        "(fg)2h": flat(star(fg, h, induced_mapping(prod_fg, "J", q2), r2), lambda c: (c[0][0], c[0][1], c[1])),
        "f1(gh)": flat(star(f, gh, p1, induced_mapping(prod_gh, "I", q1)), lambda c: (c[0], c[1][0], c[1][1])),
        "f3(gh)": flat(star(f, gh, p3, induced_mapping(prod_gh, "J", r3)), lambda c: (c[0], c[1][0], c[1][1])),
        "f3(hg)": flat(star(f, hg, p3, induced_mapping(prod_hg, "I", r3)), lambda c: (c[0], c[1][1], c[1][0])),
    }


def counterexample_triple():
    """One-point ``M1`` and ``M3``, two-point ``M2``: the iterated combinations differ."""
    half = [F(1, 2), F(1, 2)]
    f, g, h = Dist(("i1", "i2"), half), Dist(("j1", "j2"), half), Dist(("k1", "k2"), half)
    maps = dict(
        p1=make_mapping(f.index, {"i1": "*", "i2": "*"}),
        q1=make_mapping(g.index, {"j1": "*", "j2": "*"}),
        q2=make_mapping(g.index, {"j1": "1", "j2": "2"}),
        r2=make_mapping(h.index, {"k1": "1", "k2": "2"}),
        r3=make_mapping(h.index, {"k1": "*", "k2": "*"}),
        p3=make_mapping(f.index, {"i1": "*", "i2": "*"}),
    )
    return f, g, h, maps


def two_level_tree():
    """Root stage ``{t0, t1}``; both depth-one florets share stage ``{t2, t3}``."""
    from markovcomb.stagedtree import make_tree

    return make_tree(
        "r",
        {
            "r": [("L", "t0"), ("R", "t1")],
            "L": [("LL", "t2"), ("LR", "t3")],
            "R": [("RL", "t2"), ("RR", "t3")],
        },
    )


def partner_tree():
    """Same root stage as :func:`two_level_tree`; subtrees of sizes three and two."""
    from markovcomb.stagedtree import make_tree

    return make_tree(
        "s",
        {
            "s": [("A", "t0"), ("B", "t1")],
            "A": [("A0", "a0"), ("A1", "a1"), ("A2", "a2")],
            "B": [("B0", "b0"), ("B1", "b1")],
            "B0": [("B00", "c0"), ("B01", "c1")],
        },
    )


def theta_from_labels(stages, labels):
    """Parameter point of a tree model: every stage label except the last."""
    return tuple(labels[label] for stage in stages for label in stage[:-1])


def simplex_grid_max(weights, steps):
    """Exact ``max sum_i a_i log(n_i / steps)`` over ``n_i >= 0`` with ``sum n_i = steps``.

    Dynamic programming over coordinates and remaining budget; a coordinate
    with positive weight needs ``n_i >= 1``.  Returns ``-inf`` when infeasible.
    """
    import math

    best = {0: 0.0}
    for a in weights:
        nxt = {}
        for used, val in best.items():
            for n in range(0 if a == 0 else 1, steps - used + 1):
                v = val + (float(a) * math.log(n / steps) if a else 0.0)
                if v > nxt.get(used + n, -math.inf):
                    nxt[used + n] = v
        best = nxt
    return best.get(steps, -math.inf)


def separable_grid_max(x, p, q, steps):
    """Largest pure-mixture log-likelihood over the product grid of step ``1/steps``.

    The log-likelihood splits as ``sum_k u_Mk log h_k + sum_i u_i log lam_i +
    sum_j v_j log mu_j`` with ``h`` and every fiber weight vector on its own
    simplex, so the grid maximum is the sum of per-simplex grid maxima.
    """
    from markovcomb.mle import margins

    u, v, um, _ = margins(x.reindex(mapping_product(p, q).pairs), mapping_product(p, q))
    total = simplex_grid_max([um[k] for k in p.codomain], steps)
    for k in p.codomain:
        total += simplex_grid_max([u[i] for i in p.fibers[k]], steps)
        total += simplex_grid_max([v[j] for j in q.fibers[k]], steps)
    return total


def simplex_points(d, steps):
    """All grid points of the ``d``-category simplex with step ``1/steps``."""
    for cut in itertools.combinations(range(steps + d - 1), d - 1):
        bounds = (-1,) + cut + (steps + d - 1,)
        yield tuple(Fraction(bounds[n + 1] - bounds[n] - 1, steps) for n in range(d))


def gof_pvalue(draws, law: Dist) -> float:
    """Chi-square goodness-of-fit p-value of draws against an exact law.

    Cells of probability zero must be empty and are left out of the test.
    """
    from scipy.stats import chisquare

    from markovcomb.sampling import counts

    observed = counts(draws, law.index)
    n = len(draws)
    obs, exp = [], []
    for c, o in zip(law.index, observed):
        if law[c] == 0:
            assert o == 0, f"draw in a cell of probability zero: {c!r}"
            continue
        obs.append(o)
        exp.append(float(law[c]) * n)
    return float(chisquare(obs, exp).pvalue)


# Block H_k of the Horn matrix for |I_k| = 3, |J_k| = 4, rendered row by row.
DISPLAYED_BLOCK = """\
1&1&1&1& & & & & & & & \\\\
 & & & &1&1&1&1& & & & \\\\
 & & & & & & & &1&1&1&1\\\\
1& & & &1& & & &1& & & \\\\
 &1& & & &1& & & &1& & \\\\
 & &1& & & &1& & & &1& \\\\
 & & &1& & & &1& & & &1\\\\
-1&-1&-1&-1&-1&-1&-1&-1&-1&-1&-1&-1
"""


def render_block(block):
    rows = ["&".join(" " if v == 0 else str(v) for v in row) for row in block.tolist()]
    return "\\\\\n".join(rows) + "\n"


# Block swap on two blocks of I and J, with the matching parameter moves.
FLIP_INDEX_I = ("0", "1", "2", "3")
FLIP_INDEX_J = ("x0", "x1", "x2", "y0", "y1", "y2")
FLIP_P = make_mapping(FLIP_INDEX_I, {"0": "A", "1": "A", "2": "B", "3": "B"})
FLIP_Q = make_mapping(FLIP_INDEX_J, {j: "A" if j[0] == "x" else "B" for j in FLIP_INDEX_J})
FLIP_I = make_action(FLIP_INDEX_I, {"e": {i: i for i in FLIP_INDEX_I}, "t": {i: str(3 - int(i)) for i in FLIP_INDEX_I}})
FLIP_J = make_action(
    FLIP_INDEX_J,
    {"e": {j: j for j in FLIP_INDEX_J}, "t": {j: ("y" if j[0] == "x" else "x") + j[1] for j in FLIP_INDEX_J}},
)


def pair_transport():
    """Parameter move of the saturated pair matching the block swap.

    Coordinates: ``(h_B, lam_1, lam_3, mu_x1, mu_x2, mu_y1, mu_y2)``.
    """

    def flip(t):
        hb, l1, l3, x1, x2, y1, y2 = t
        return (1 - hb, 1 - l3, 1 - l1, y1, y2, x1, x2)

    return ParamTransport({"e": lambda t: t, "t": flip})


def h_transport():
    return ParamTransport({"e": lambda t: t, "t": lambda t: (1 - t[0],)})


def consistent_pairs_sharing_h(f, n=64):
    """Parameter pairs of the saturated pair that share the ``h`` coordinate."""
    pts = f.box.sample(n)
    return [a + (a[0],) + b[1:] for a, b in zip(pts, reversed(pts))]
