"""Exception hierarchy shared by every module of the package."""


class WishartMomentsError(Exception):
    """Base class for all errors raised by this package."""


class LimitExceeded(WishartMomentsError):
    """An enumeration was requested above the configured size cap."""


class DomainError(WishartMomentsError, ValueError):
    """Arguments outside the domain of a combinatorial function."""


class DimensionMismatch(WishartMomentsError, ValueError):
    pass


class FlavorMismatch(WishartMomentsError, ValueError):
    pass


class NotSymmetric(WishartMomentsError, ValueError):
    pass


class NotHermitian(WishartMomentsError, ValueError):
    pass


class NotPositiveDefinite(WishartMomentsError, ValueError):
    pass


class MeanMismatch(WishartMomentsError, ValueError):
    """Mean vectors do not reproduce the mean square matrix."""


class Singular(WishartMomentsError, ArithmeticError):
    pass


class BranchUndefined(WishartMomentsError, ArithmeticError):
    """A fractional determinant power left its principal-branch domain."""


class OrderTooHigh(WishartMomentsError, ValueError):
    pass


class ExpressionSyntaxError(WishartMomentsError, ValueError):
    """Malformed moment expression; ``position`` is the 0-based offset."""

    def __init__(self, message, position):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class IndexOutOfRange(WishartMomentsError, ValueError):
    pass


class SchemaError(WishartMomentsError, ValueError):
    pass
