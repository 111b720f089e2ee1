"""Exception hierarchy.

Every error carries an ``exit_code`` used by the CLI:
2 for validation failures, 3 for budget/limit overruns, 4 for broken
internal invariants.
"""


class SpinalError(Exception):
    exit_code = 4
    code = "internal"


class ValidationError(SpinalError):
    exit_code = 2
    code = "validation"


class LimitError(SpinalError):
    exit_code = 3
    code = "limit"


# finite_algebra
class NotAssociative(ValidationError):
    code = "not_associative"


class NoIdentity(ValidationError):
    code = "no_identity"


class NoInverse(ValidationError):
    code = "no_inverse"


class DuplicateName(ValidationError):
    code = "duplicate_name"


class NotHomomorphism(ValidationError):
    code = "not_homomorphism"


class NotFaithful(ValidationError):
    code = "not_faithful"


class NotTransitive(ValidationError):
    code = "not_transitive"


class NotSurjective(ValidationError):
    code = "not_surjective"


class KernelsDoNotCover(ValidationError):
    code = "kernels_do_not_cover"


class KernelIntersectionNontrivial(ValidationError):
    code = "kernel_intersection_nontrivial"


# omega / words
class UnknownEpiId(ValidationError):
    code = "unknown_epi"


class NotAdmissible(ValidationError):
    code = "not_admissible"


class NotFactorable(ValidationError):
    code = "not_factorable"


class WeightUndefined(ValidationError):
    code = "weight_undefined"


class ParseError(ValidationError):
    code = "parse"


# spinal_core
class NotLevelStabilizing(ValidationError):
    code = "not_level_stabilizing"

    def __init__(self, message, path=()):
        super().__init__(message)
        self.path = tuple(path)


class ClosureLimitExceeded(LimitError):
    code = "closure_limit"


# bounds / growth / period
class InvalidRange(ValidationError):
    code = "invalid_range"


class BudgetExceeded(LimitError):
    code = "budget"


class InvalidCutoff(ValidationError):
    code = "invalid_cutoff"


class PreconditionViolated(ValidationError):
    code = "precondition"


class RecursionLimit(LimitError):
    code = "recursion_limit"


class LengthBlowup(LimitError):
    code = "length_blowup"


class HypothesesViolated(ValidationError):
    code = "hypotheses"


class ColumnMatchFailed(SpinalError):
    code = "column_match"
