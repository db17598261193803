"""Exception types shared across the package."""


class DomainError(ValueError):
    """Input outside an operation's domain (bad vertex, bad family, bad shape)."""


class NumericError(ArithmeticError):
    """An iterative numerical routine failed to converge."""


class ResourceError(RuntimeError):
    """A construction would exceed a configured size cap."""
