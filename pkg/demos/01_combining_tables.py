"""Combining two tables that agree on a coarse variable.

Run with ``python3 demos/01_combining_tables.py``.  Each ``# %%`` block is a
cell that can also be executed on its own in an editor with cell support.
"""

# %% Two distributions and their coarsenings
import warnings
from fractions import Fraction as F

from markovcomb import (
    Dist,
    SubnormalizedWarning,
    aggregate,
    is_consistent,
    left_combine,
    make_mapping,
    mapping_product,
    project,
    right_combine,
    star,
)

# Letters are grouped into "1" = {a} and "2" = {b, c}; suits into
# "1" = {clubs, diamonds, hearts} and "2" = {spades}.
p = make_mapping("abc", {"a": "1", "b": "2", "c": "2"})
q = make_mapping("♣♦♥♠", {"♣": "1", "♦": "1", "♥": "1", "♠": "2"})

f = Dist("abc", ["3/4", "1/8", "1/8"])
g = Dist("♣♦♥♠", ["1/4"] * 4)
print("f aggregated:", aggregate(f, p))
print("g aggregated:", aggregate(g, q))
print("consistent:", is_consistent(f, g, p, q))

# %% The product index holds the pairs that agree on the coarse variable
prod = mapping_product(p, q)
for k, i, j in prod.triples:
    print(f"  block {k}: ({i}, {j})")

# %% Combining recovers both inputs as margins
h = star(f, g, p, q)
print(h)
assert project(h, prod, "I") == f
assert project(h, prod, "J") == g

# %% Without consistency the two one-sided versions differ
f_bad = Dist("abc", ["1/8", "1/8", "3/4"])
print("consistent:", is_consistent(f_bad, g, p, q))
left, right = left_combine(f_bad, g, p, q), right_combine(f_bad, g, p, q)
print("left  keeps f:", project(left, prod, "I") == f_bad)
print("right keeps f:", project(right, prod, "I") == f_bad, "| total", right.total())

# %% A block with no mass: strict mode refuses, permissive mode zeroes it
f_zero = Dist("abc", [0, F(1, 2), F(1, 2)])
with warnings.catch_warnings(record=True) as caught:
    warnings.simplefilter("always")
    out = left_combine(f_zero, g, p, q, strict=False)
print(out, "| warnings:", [w.category.__name__ for w in caught if issubclass(w.category, SubnormalizedWarning)])
