"""Exception hierarchy shared by every module."""


class CascadeError(Exception):
    """Base class for errors raised by scalecascade."""


class DomainError(CascadeError, ValueError):
    """An input lies outside the mathematical domain of an operation."""


class ResourceError(CascadeError):
    """A configured size cap (e.g. full polynomial depth) would be exceeded."""
