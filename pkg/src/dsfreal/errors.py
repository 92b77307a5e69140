"""Exception hierarchy."""


class DsfError(Exception):
    """Base class for all package errors."""


class DomainError(DsfError, ValueError):
    """Operation undefined for the given argument (e.g. roots of zero)."""


class PoleHitError(DsfError, ZeroDivisionError):
    """A rational function was evaluated at one of its poles."""

    def __init__(self, location):
        super().__init__(f"evaluation at pole s={location}")
        self.location = location


class DimensionError(DsfError, ValueError):
    pass


class ProbingError(DsfError, RuntimeError):
    pass


class AssumptionViolation(DsfError):
    """Simple-pole / pole-zero-disjointness assumption does not hold."""

    def __init__(self, message, location=None):
        super().__init__(message)
        self.location = location


class RankDeficiencyError(DsfError):
    """[I-Q, P] does not have full normal row rank."""


class ContractError(DsfError, ValueError):
    """Input violates a documented structural contract (properness, hollowness, ...)."""


class SelectionError(DsfError, ValueError):
    """A pole selection is infeasible for the capacity vector."""
