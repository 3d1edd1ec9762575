"""Markov combinations of discrete categorical models.

Exact rational vectors over finite category sets, category mappings and
their products, the family of Markov combinations of vectors and parametric
models, and applications to copulas, staged trees, invariance and maximum
likelihood estimation.
"""

from .combine import (
    SubnormalizedWarning,
    induced_mapping,
    is_consistent,
    left_combine,
    project,
    right_combine,
    star,
    star_all,
)
from .core import (
    CategoryMapping,
    Dist,
    IndexedVector,
    ProductIndex,
    aggregate,
    compose_mappings,
    constant_mapping,
    fiber,
    identity_mapping,
    make_mapping,
    mapping_product,
)
from .errors import MarkovCombinationError

__version__ = "0.1.0"

__all__ = [
    "CategoryMapping",
    "Dist",
    "IndexedVector",
    "MarkovCombinationError",
    "ProductIndex",
    "SubnormalizedWarning",
    "aggregate",
    "compose_mappings",
    "constant_mapping",
    "fiber",
    "identity_mapping",
    "induced_mapping",
    "is_consistent",
    "left_combine",
    "make_mapping",
    "mapping_product",
    "project",
    "right_combine",
    "star",
    "star_all",
]
