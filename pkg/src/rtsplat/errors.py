"""Exception types shared across the package."""


class RTSplatError(Exception):
    """Base class for all package errors."""


class InvalidParameterError(RTSplatError):
    """A parameter value violates its contract (non-finite, wrong range, ...)."""


class ContractViolationError(RTSplatError):
    """An internal precondition was violated (e.g. missing forward record)."""


class UndefinedRegionError(RTSplatError):
    """A region-restricted metric was asked to average over an empty region."""
