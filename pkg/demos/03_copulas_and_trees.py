"""Copula products and staged trees as combinations.

Run with ``python3 demos/03_copulas_and_trees.py``.
"""

# %% Discrete copulas from bistochastic matrices
import numpy as np

from markovcomb.copula import (
    copula_from_bistochastic,
    density_from_copula,
    density_to_matrix,
    permutation_matrix,
    product_copula,
    product_via_markov,
    random_birkhoff,
    validate_copula,
)

rng = np.random.default_rng(0)
A = random_birkhoff(3, rng)
B = permutation_matrix([2, 0, 1])
CA, CB = copula_from_bistochastic(A), copula_from_bistochastic(B)
print("valid:", validate_copula(CA).valid, validate_copula(CB).valid)

# %% The copula product equals an aggregated combination of the densities
gamma = product_via_markov(density_from_copula(CA), density_from_copula(CB))
expected = density_from_copula(product_copula(CA, CB))
print("equal:", gamma == expected)
for row in density_to_matrix(gamma, 3):
    print("  ", [str(x) for x in row])

# %% Two staged trees sharing their first split
from markovcomb.stagedtree import (
    decompose,
    make_tree,
    models_equal,
    path_probabilities,
    staged_combine,
    staged_meta_consistent,
)

T = make_tree("r", {
    "r": [("L", "t0"), ("R", "t1")],
    "L": [("LL", "t2"), ("LR", "t3")],
    "R": [("RL", "t2"), ("RR", "t3")],
})
T2 = make_tree("s", {
    "s": [("A", "t0"), ("B", "t1")],
    "A": [("A0", "a0"), ("A1", "a1"), ("A2", "a2")],
    "B": [("B0", "b0"), ("B1", "b1")],
})
dec, dec2 = decompose(T, ["L", "R"]), decompose(T2, ["A", "B"])
phi = {"L": "A", "R": "B"}
print("meta-consistent:", bool(staged_meta_consistent(T, dec, T2, dec2, phi)))

# %% Grafting the second tree's subtrees below the first tree
comb = staged_combine(T, dec, T2, dec2, phi)
print("leaves:", len(comb.tree.leaves))
labels = {"t0": "1/3", "t1": "2/3", "t2": "1/4", "t3": "3/4",
          "a0": "1/2", "a1": "1/4", "a2": "1/4", "b0": "1/5", "b1": "4/5"}
print(comb.as_product_dist(labels))
print("first tree's paths:", path_probabilities(T, labels))

# %% Swapping the roles gives the same model up to relabeling
back = staged_combine(T2, dec2, T, dec, {v: k for k, v in phi.items()})
by_pair = {pair: leaf for leaf, pair in back.pairs.items()}
path_map = {leaf: by_pair[(j, i)] for leaf, (i, j) in comb.pairs.items()}
print("equivalent:", models_equal(comb.tree, back.tree, path_map=path_map))
