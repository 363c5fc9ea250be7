"""Exception types raised across the package."""


class ProductMixError(Exception):
    """Base class for all domain errors."""


class MarginalPrice(ProductMixError):
    """A unique demanded bundle was requested at a price with marginal bids."""


class InfeasibleBundle(ProductMixError):
    """No market-clearing price exists for the requested bundle."""


class InfeasibleTarget(ProductMixError):
    """Price search left the feasibility box; the target cannot be cleared."""


class ConvergenceFailure(ProductMixError):
    """The min-norm-point solver exceeded its iteration cap."""


class NoMarginals(ProductMixError):
    """A graph subroutine was invoked on a problem without marginal bids."""


class BadCluster(ProductMixError):
    """A demand cluster argument violated its preconditions."""


class NotClearing(ProductMixError):
    """The supplied price does not clear the target bundle."""


class StepUnbounded(ProductMixError):
    """No finite step length exists in the given direction."""


class EmptySet(ProductMixError):
    """An operation requiring a nonempty collection received an empty one."""


class ScaleExceeded(ProductMixError):
    """Input is too large for the brute-force validity oracle."""


class RetryLimit(ProductMixError):
    """Instance generation exhausted its rejection-sampling budget."""


class ParseError(ProductMixError):
    """An auction file could not be parsed."""

    def __init__(self, message, *, field=None):
        super().__init__(message)
        self.field = field


class DimensionError(ProductMixError):
    """An operation was invoked with an unsupported number of goods."""
