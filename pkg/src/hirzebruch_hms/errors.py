"""Exception types raised by the category construction."""


class HMSError(Exception):
    """Base class for all errors raised by this package."""


class NotInPolytope(HMSError, ValueError):
    def __init__(self, point, violation):
        self.point = tuple(point)
        self.violation = violation
        super().__init__(
            f"point {self.point} lies outside the moment polytope "
            f"(inequality violated by {violation:.3e})"
        )


class M1Violation(HMSError):
    """Degree of a component is not constant or not well defined."""

    def __init__(self, message, label=None, index=None):
        self.label = label
        self.index = index
        where = ""
        if label is not None:
            where = f" [label={tuple(label)}, index={tuple(index) if index is not None else None}]"
        super().__init__(message + where)


class UnboundedPotential(HMSError):
    """f_I is not bounded below on P, so it cannot be normalized."""


class BudgetExceeded(HMSError):
    def __init__(self, message, tree=None):
        self.tree = tree
        super().__init__(message)


class NonAdjacentDegrees(HMSError, ValueError):
    pass


class CompositionTypeError(HMSError, TypeError):
    pass


class MissingTarget(HMSError, LookupError):
    pass
