"""Exception types shared across the package."""


class HyperAimError(Exception):
    """Base class for all package errors."""


class ConfigError(HyperAimError):
    """Invalid run configuration; the message names the offending field."""


class DomainError(HyperAimError, ValueError):
    """Argument outside the domain of a map or series operation."""


class OrderMismatch(HyperAimError, ValueError):
    """Binary jet operation on jets with different order or expansion point."""


class OrderExhausted(HyperAimError):
    """A derivative was requested from an order-0 jet."""


class DivisionByZeroConstantTerm(HyperAimError, ZeroDivisionError):
    """Series division by a jet whose constant term vanishes."""


class UnsupportedParams(HyperAimError, ValueError):
    """Parameters outside the closed-form spectrum's range of validity."""


class NoRootsFound(HyperAimError):
    """The termination determinant has no sign change in the energy window."""


class GridTooCoarse(UserWarning):
    """Two-grid oracle estimates disagree by more than the tolerance."""
