"""Combining parametric models.

Run with ``python3 demos/02_parametric_models.py``.
"""

# %% Two one-parameter linear models on [0, 1/4]
from fractions import Fraction as F

from markovcomb import make_mapping
from markovcomb.parametric import (
    consistent_saturated_pair,
    evaluate,
    expfam_combination_dim,
    is_meta_consistent,
    jacobian_rank,
    meta_star,
    mixture,
    mixture_via_chain,
    polynomial_model,
    restricted_lower,
    saturated,
    super_combine,
)


def linear(index, coeffs):
    """Entries ``a + b t`` for each ``(a, b)``."""
    entries = [[(str(a), [0]), (str(b), [1])] for a, b in coeffs]
    return polynomial_model(index, [0], ["1/4"], entries)


p = make_mapping("abc", {"a": "1", "b": "2", "c": "2"})
q = make_mapping("♣♦♥♠", {"♣": "1", "♦": "1", "♥": "1", "♠": "2"})
f = linear("abc", [(0, 3), (0, 1), (1, -4)])
g = linear("♣♦♥♠", [(0, 1), (0, 1), (0, 1), (1, -3)])
f2 = linear("abc", [(1, -4), (0, 2), (0, 2)])

# %% f and g agree on the coarse variable at every parameter value
print(is_meta_consistent(f, g, p, q))
c = meta_star(f, g, p, q)
print("at t = 1/8:", evaluate(c, (F(1, 8),)))

# %% f2 and g agree only at isolated parameter values
grid = [F(k, 70) for k in range(18)]
print("consistent grid points:", restricted_lower(f2, g, p, q, grid=grid).parameter_set)
print("solved exactly:       ", restricted_lower(f2, g, p, q, solver="exact").parameter_set)

# %% Flagged combinations switch between the two one-sided versions
s = super_combine(f2, g, p, q)
t = F(1, 10)
print("flag 0:", evaluate(s, (t, t, t, 0)))
print("flag 1:", evaluate(s, (t, t, t, 1)))

# %% A binary mixture built only from combinations and aggregates
m1 = saturated("xyz")
chain, direct = mixture_via_chain(m1, m1), mixture(m1, m1)
point = (F(1, 5), F(3, 10), F(2, 3))
print(evaluate(chain, point) == evaluate(direct, point))

# %% Dimension of a combination of saturated models
p4 = make_mapping("0123", {"0": "A", "1": "A", "2": "B", "3": "B"})
q3 = make_mapping("xyz", {"x": "A", "y": "B", "z": "B"})
fs, gs = consistent_saturated_pair(p4, q3)
combined = meta_star(fs, gs, p4, q3)
print("dimension (model, ambient):", expfam_combination_dim(p4, q3))
print("numeric Jacobian rank:", jacobian_rank(combined, fs.box.sample(2)[1]))
