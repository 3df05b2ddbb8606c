"""Exception types shared across the package."""


class DomainError(ValueError):
    """A vector lies outside the truncated space where an operation is defined."""


class InsufficientDataError(ValueError):
    """Not enough samples to evaluate the requested statistic."""


class DataFormatError(ValueError):
    """An input file could not be parsed into the expected structure."""
