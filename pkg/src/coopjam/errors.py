"""Exception types raised by the solver and I/O layers."""


class CoopJamError(Exception):
    """Base class for all package errors."""


class ZeroChannelError(CoopJamError, ValueError):
    """A relay-to-Bob channel is (numerically) zero, so no null direction exists."""


class DomainError(CoopJamError, ValueError):
    """An argument lies outside the feasible domain of the operation."""


class SizeError(CoopJamError, ValueError):
    """The instance is too large for a brute-force routine."""


class ConvergenceError(CoopJamError, RuntimeError):
    """The dual bisection failed to bracket or converge.

    ``z`` and the final multiplier bracket are kept for diagnostics.
    """

    def __init__(self, message, z=None, bracket=None):
        super().__init__(message)
        self.z = z
        self.bracket = bracket


class ParseError(CoopJamError, ValueError):
    """Malformed instance file. ``field`` and ``line`` locate the problem when known."""

    def __init__(self, message, field=None, line=None):
        where = []
        if field is not None:
            where.append(f"field {field!r}")
        if line is not None:
            where.append(f"line {line}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)
        self.field = field
        self.line = line
