"""Exception hierarchy shared by all modules.

Every failure mode that callers are expected to catch has its own class;
anything else is a plain bug and surfaces as a standard exception.
"""


class BTLabError(Exception):
    """Base class for all domain errors."""

    code = "error"


class FieldMismatch(BTLabError):
    code = "field_mismatch"


class DivisionByZero(BTLabError):
    code = "division_by_zero"


class PrecisionExhausted(BTLabError):
    """A result's leading term or canonical form is not determined at the
    available precision.  Never silently approximated."""

    code = "precision_exhausted"


class SingularMatrix(BTLabError):
    code = "singular_matrix"


class NotContained(BTLabError):
    code = "not_contained"


class DimensionMismatch(BTLabError):
    code = "dimension_mismatch"


class NotAChain(BTLabError):
    code = "not_a_chain"


class NotASimplex(BTLabError):
    code = "not_a_simplex"


class NotAChamber(BTLabError):
    code = "not_a_chamber"


class NotInApartment(BTLabError):
    code = "not_in_apartment"


class BadPeriod(BTLabError):
    code = "bad_period"


class BadComposition(BTLabError):
    code = "bad_composition"


class LabelCollision(BTLabError):
    code = "label_collision"


class MissingTransition(BTLabError):
    code = "missing_transition"


class NotStabilized(BTLabError):
    code = "not_stabilized"


class NotNormalizing(BTLabError):
    code = "not_normalizing"


class NotMinimal(BTLabError):
    code = "not_minimal"


class NotMaximalField(BTLabError):
    code = "not_maximal_field"


class BoundaryContact(BTLabError):
    code = "boundary_contact"


class GuardError(BTLabError):
    """Base for size-guard violations (CLI exit code 3)."""

    code = "guard"


class TooLarge(GuardError):
    code = "too_large"


class GuardExceeded(GuardError):
    code = "guard_exceeded"
