"""Exception types shared across the solver modules."""


class RobustError(Exception):
    """Base class for all errors raised by this package."""


class Infeasible(RobustError):
    """No nominal solution satisfies the requested restrictions (value +inf)."""


class ParseError(RobustError):
    def __init__(self, message, line=None, field=None):
        self.line = line
        self.field = field
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        suffix = f" ({', '.join(where)})" if where else ""
        super().__init__(f"{message}{suffix}")


class SchemaError(RobustError):
    def __init__(self, field, message=None):
        self.field = field
        super().__init__(message or field)


class NegativeIncrement(RobustError):
    pass


class PreconditionViolated(RobustError):
    pass


class CapExceeded(RobustError):
    """Brute-force oracle called on an instance larger than its cap."""


class NonpositiveDenominator(RobustError):
    pass


class UnsupportedKind(RobustError):
    pass


class TimeLimitExceeded(RobustError):
    pass


class InvariantViolated(RobustError):
    """A result contradicts a property that holds for every instance."""
