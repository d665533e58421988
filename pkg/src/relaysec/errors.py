class InvalidInputError(ValueError):
    """Raised when an argument violates a documented precondition."""


class UnsupportedDimensionError(InvalidInputError):
    """Raised when the relay count is too small for a null-space scheme."""


class InputFormatError(InvalidInputError):
    """Raised when a realization or config file cannot be parsed."""
