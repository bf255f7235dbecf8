"""Exception hierarchy. All inherit from ValueError so callers can catch broadly."""


class FracPicardError(ValueError):
    pass


class DomainError(FracPicardError):
    """Argument outside the mathematical domain of an operation."""


class RangeError(FracPicardError):
    """Argument inside the domain but outside the range we evaluate reliably."""


class ShapeError(FracPicardError):
    """Grid or dimension mismatch between operands."""


class HypothesisError(FracPicardError):
    """Parameters violate a standing hypothesis (e.g. q <= 1/rho)."""


class EvaluationError(FracPicardError):
    """A right-hand side produced a non-finite value."""

    def __init__(self, message: str, node: int | None = None):
        super().__init__(message)
        self.node = node


class ConfigError(FracPicardError):
    """Malformed or unknown configuration entry."""

    def __init__(self, message: str, line: int | None = None, field: str | None = None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        prefix = f"[{', '.join(where)}] " if where else ""
        super().__init__(prefix + message)
        self.message = message
        self.line = line
        self.field = field
