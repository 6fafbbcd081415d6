"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """Raised when run parameters or inputs violate a documented precondition."""
