"""Closed-form estimation, symmetry checks and seeded sampling.

Run with ``python3 demos/04_estimation_symmetry_sampling.py``.
"""

# %% Maximum likelihood for a combination of saturated models
from fractions import Fraction as F

from markovcomb import IndexedVector, constant_mapping, make_mapping, mapping_product
from markovcomb.mle import build_horn_pair, log_likelihood, mle, verify_horn_identity

p = make_mapping("abc", {"a": "1", "b": "2", "c": "2"})
q = make_mapping("wxyz", {"w": "1", "x": "1", "y": "2", "z": "2"})
prod = mapping_product(p, q)
counts = IndexedVector(prod.pairs, [12, 5, 7, 3, 9, 4])
estimate = mle(counts, p, q)
print(estimate)
print("log-likelihood:", round(log_likelihood(counts, estimate), 4))

# %% The estimate is a monomial in linear forms of the data
hp = build_horn_pair(p, q)
print("column sums:", set(hp.column_sums()), "| reproduces the estimate:", verify_horn_identity(hp, counts, p, q))
block = build_horn_pair(constant_mapping("123", "k"), constant_mapping("1234", "k")).block("k")
print(block)

# %% A binomial model is symmetric under i -> n - i with t -> 1 - t
from markovcomb.invariance import ParamTransport, check_invariance, make_action
from markovcomb.parametric import binomial

n = 4
b = binomial(n)
flip = make_action(b.index, {"e": {i: i for i in b.index}, "t": {i: str(n - int(i)) for i in b.index}})
good = ParamTransport({"e": lambda t: t, "t": lambda t: (1 - t[0],)})
bad = ParamTransport({"e": lambda t: t, "t": lambda t: t})
print("with t -> 1 - t:", check_invariance(b, flip, good).invariant)
print("with t -> t:    ", check_invariance(b, flip, bad).invariant)

# %% Seeded sampling from a combined model
from scipy.stats import chisquare

from markovcomb.parametric import evaluate, meta_star, saturated
from markovcomb.sampling import counts as tally, make_rng, sample_meta_star

f, g = saturated("abc"), saturated("abc")
same = make_mapping("abc", {"a": "1", "b": "2", "c": "2"})
theta = (F(1, 5), F(1, 2))
law = evaluate(meta_star(f, g, same, same), theta)
draws = sample_meta_star(f, g, same, same, theta, make_rng(42), 20_000)
observed = tally(draws, law.index)
expected = [float(x) * len(draws) for x in law.entries]
keep = [k for k, e in enumerate(expected) if e > 0]
print("chi-square p-value:", round(chisquare([observed[k] for k in keep], [expected[k] for k in keep]).pvalue, 3))
