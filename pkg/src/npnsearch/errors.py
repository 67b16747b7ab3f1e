"""Exception types shared across the package."""


class NpnSearchError(Exception):
    """Base class for all package-specific errors."""


class CapacityError(NpnSearchError):
    """Requested more edges than the node count can hold."""


class InsufficientDataError(NpnSearchError):
    """An operation needs more rows (or effective sample size) than available."""


class DegenerateColumnError(NpnSearchError):
    """A data column is constant and cannot be rank-transformed."""


class SimulationOverflowError(NpnSearchError):
    """A simulated value left the finite float range."""


class SingularityError(NpnSearchError):
    """A submatrix that must be positive definite is not."""


class ExtensionError(NpnSearchError):
    """A partially directed graph admits no consistent DAG extension."""


class DenominatorError(NpnSearchError):
    """A metric ratio has a zero denominator but a nonzero numerator."""


class EmptyAggregateError(NpnSearchError):
    """Aggregation was asked for an empty sequence of reports."""


class EmptyResultError(NpnSearchError):
    """A table was requested for an empty result set."""
