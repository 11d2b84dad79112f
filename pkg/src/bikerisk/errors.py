"""Shared exception types."""


class BikeriskError(Exception):
    """Base class for all package errors."""


class ConfigError(BikeriskError):
    """Invalid configuration or parameter value."""


class DataError(BikeriskError):
    """Input data cannot be parsed or is unusable."""


class DensityError(BikeriskError):
    """Density estimation cannot proceed (empty input, misaligned grids, ...)."""


class RoutingError(BikeriskError):
    """Route computation failed."""


class NoRouteError(RoutingError):
    """Destination not reachable from the departure node."""
