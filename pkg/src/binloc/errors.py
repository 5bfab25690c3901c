class BinlocError(Exception):
    """Base class for all errors raised by binloc."""


class ValidationError(BinlocError, ValueError):
    """Invalid configuration or input data."""


class ModelValidityError(ValidationError):
    """Parameters for which the encounter-rate model is undefined (lambda <= a)."""


class DomainError(BinlocError, ValueError):
    """Argument outside the mathematical domain of a function."""


class SamplingError(BinlocError, RuntimeError):
    """A rejection sampler ran out of budget."""


class DegeneratePosteriorError(BinlocError, RuntimeError):
    """Every importance weight is zero."""
