"""Exception taxonomy.

Every error raised by this package derives from ExpanderlabError so callers
can catch the whole family; names mirror the failure they report.
"""


class ExpanderlabError(Exception):
    pass


# --- field / element errors -------------------------------------------------

class NonPrimeModulus(ExpanderlabError):
    pass


class MissingModulus(ExpanderlabError):
    pass


class DivisionByZero(ExpanderlabError, ZeroDivisionError):
    pass


class ContextMismatch(ExpanderlabError):
    pass


class FieldMismatch(ExpanderlabError):
    """Operation restricted to one context kind (e.g. incidence geometry is
    rational-only)."""


# --- set / graph errors -----------------------------------------------------

class ZeroDilation(ExpanderlabError):
    pass


class ZeroElementPresent(ExpanderlabError):
    pass


class InvalidSetFile(ExpanderlabError):
    pass


class GraphTooSparse(ExpanderlabError):
    pass


class EpsilonOutOfRange(ExpanderlabError):
    pass


# --- energy errors ----------------------------------------------------------

class TOutOfRange(ExpanderlabError):
    pass


class ZeroTwist(ExpanderlabError):
    pass


class PrecisionCapExceeded(ExpanderlabError):
    """Interval refinement hit the precision cap.  Carries the widest
    enclosure achieved so the caller can still report it."""

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved


class BudgetExceeded(ExpanderlabError):
    pass


# --- verification errors ----------------------------------------------------

class UnknownRelation(ExpanderlabError):
    pass


class SideConditionViolated(ExpanderlabError):
    pass


class SetTooSmall(ExpanderlabError):
    pass


class DensityViolated(ExpanderlabError):
    pass


class DuplicateInput(ExpanderlabError):
    pass


class CollisionFound(ExpanderlabError):
    """The exhaustive injectivity check found two tuples with the same image.
    This would falsify the construction on the instance, so it is never
    silent: the colliding pair is attached."""

    def __init__(self, message, first=None, second=None):
        super().__init__(message)
        self.first = first
        self.second = second


class WitnessFailure(ExpanderlabError):
    """A constructed witness point failed its incidence requirement."""


class InvariantViolation(ExpanderlabError):
    """An internal exact cross-check failed.  Either a bug or a genuine
    counterexample to a constant-free claim; both must surface loudly."""
