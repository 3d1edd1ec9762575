"""Exception hierarchy.

Every error raised for a domain reason (inconsistent inputs, zero aggregates,
invalid structures) derives from :class:`MarkovCombinationError` and carries a
short machine-readable ``code`` used by the command-line front end.
"""


class MarkovCombinationError(ValueError):
    code = "error"

    def __init__(self, message="", **detail):
        super().__init__(message)
        self.detail = detail

    def to_json(self):
        out = {"error": self.code, "detail": str(self)}
        out.update({k: _plain(v) for k, v in self.detail.items()})
        return out


def _plain(value):
    if isinstance(value, (str, int, float, bool)) or value is None:
        return value
    if isinstance(value, (tuple, list)):
        return [_plain(v) for v in value]
    return str(value)


class IndexMismatch(MarkovCombinationError):
    code = "index_mismatch"


class InvalidMapping(MarkovCombinationError):
    code = "invalid_mapping"


class CodomainMismatch(MarkovCombinationError):
    code = "codomain_mismatch"


class NotADistribution(MarkovCombinationError):
    code = "not_a_distribution"


class ZeroAggregate(MarkovCombinationError):
    code = "zero_aggregate"

    def __init__(self, k, message=None):
        super().__init__(message or f"aggregate of metacategory {k!r} is zero", metacategory=k)
        self.metacategory = k


class NotConsistent(MarkovCombinationError):
    code = "not_consistent"


class NotMetaConsistent(MarkovCombinationError):
    code = "not_meta_consistent"

    def __init__(self, message, theta=None, gap=None):
        super().__init__(message, theta=theta, gap=gap)
        self.theta = theta
        self.gap = gap


class InconsistentPair(MarkovCombinationError):
    code = "inconsistent_pair"


class EmptyParameterSet(MarkovCombinationError):
    code = "empty_parameter_set"


class OutOfBox(MarkovCombinationError):
    code = "out_of_box"


class InvalidCopula(MarkovCombinationError):
    code = "invalid_copula"


class NotBistochastic(MarkovCombinationError):
    code = "not_bistochastic"


class InvalidTree(MarkovCombinationError):
    code = "invalid_tree"


class InvalidDecomposition(MarkovCombinationError):
    code = "invalid_decomposition"


class ZeroBlock(MarkovCombinationError):
    code = "zero_block"


class AllZero(MarkovCombinationError):
    code = "all_zero"


class SupportViolation(MarkovCombinationError):
    code = "support_violation"


class InvalidAction(MarkovCombinationError):
    code = "invalid_action"


class NotCompatible(MarkovCombinationError):
    code = "not_compatible"
