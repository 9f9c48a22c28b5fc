"""Exception types shared across the package."""


class GeometryError(ValueError):
    """Malformed geometric input (open loop, inconsistent arc, bad orientation)."""


class DomainError(ValueError):
    """Input outside an operation's stated domain (wrong N, empty set, ...)."""


class PreconditionError(ValueError):
    """A named hypothesis of a construction or inequality is violated.

    The message always names the failing inequality or quantity.
    """


class UnsupportedOperationError(GeometryError):
    """Operation not defined for this input (e.g. boolean ops on arc regions)."""


class ParseError(ValueError):
    """Invalid geometry/cluster JSON; message carries the offending field path."""
