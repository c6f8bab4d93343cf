"""Exception types shared across the tracking pipeline."""


class TrackingError(Exception):
    """Base class for all errors raised by this package."""


class GeometryError(TrackingError):
    """Degenerate box, negative buffer scale, or non-positive dimensions."""


class ConfidenceError(TrackingError):
    """Confidence value outside [0, 1]."""


class NumericError(TrackingError):
    """Non-finite state values or a singular covariance."""


class CostMatrixError(TrackingError):
    """Assignment cost matrix contains non-finite entries."""


class StateError(TrackingError):
    """Invalid tracklet state or out-of-order frame sequencing."""


class ContractError(TrackingError):
    """Internal dimension mismatch between precomputed matrices."""


class ParseError(TrackingError):
    """Malformed MOT row on read, or invalid rows handed to a writer."""


class ConfigError(TrackingError):
    """Unknown or out-of-range configuration field."""
