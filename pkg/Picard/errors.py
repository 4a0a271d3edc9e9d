"""Exception hierarchy shared by every Picard module."""


class PicardError(ValueError):
    kind = "picard_error"


class MissingVariable(PicardError):
    kind = "missing_variable"


class DegreeMismatch(PicardError):
    kind = "degree_mismatch"


class DegreeTooSmall(PicardError):
    kind = "degree_too_small"


class SingularMatrix(PicardError):
    kind = "singular_matrix"


class DenominatorVanished(PicardError):
    kind = "denominator_vanished"


class ConstraintViolated(PicardError):
    kind = "constraint_violated"


class NonLinearOccurrence(PicardError):
    kind = "non_linear_occurrence"


class NotDivisible(PicardError):
    kind = "not_divisible"


class NotInSublattice(PicardError):
    kind = "not_in_sublattice"


class OutOfRange(PicardError):
    kind = "out_of_range"


class InvalidParams(PicardError):
    kind = "invalid_params"


class EmptyStack(PicardError):
    kind = "empty_stack"


class InternalInconsistency(PicardError):
    kind = "internal_inconsistency"
