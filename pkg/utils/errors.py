"""
Exception hierarchy for the solver.

Every failure the package raises on purpose derives from YamabeError so the
CLI can map it to an exit code (see ux/error_handling.py).

None of these derive from ValueError: schema validators raise them directly
and pydantic only wraps ValueError/AssertionError, so the typed error reaches
the caller intact.
"""

from typing import Any, Optional


class YamabeError(Exception):
    """Base class for all solver errors."""


class InstanceParseError(YamabeError):
    """Instance or solution file could not be parsed."""

    def __init__(self, message: str, path: Optional[str] = None):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class InstanceValidationError(YamabeError):
    """
    A parsed value violates a ProblemInstance / WeightedGraph invariant.

    Carries the offending field name and, when it is an array entry, the index.
    """

    def __init__(self, field: str, message: str, index: Optional[int] = None):
        self.field = field
        self.index = index
        self.reason = message
        location = f"{field}[{index}]" if index is not None else field
        super().__init__(f"{location}: {message}")


class DomainError(YamabeError):
    """An operation was called outside its precondition."""

    def __init__(self, operation: str, message: str):
        self.operation = operation
        super().__init__(f"{operation}: {message}")


class DimensionError(DomainError):
    """Vertex or edge function length does not match the graph."""


class NotConvergedError(YamabeError):
    """Every restart exhausted its iteration budget."""

    def __init__(self, result: Any):
        self.result = result
        super().__init__(
            f"solver did not converge after {result.iterations} iterations "
            f"(best residual_inf={result.residual_inf:.3e})"
        )


class OracleError(YamabeError):
    """Oracle precondition failed or its internal consistency check did not pass."""


class SweepSpecError(YamabeError):
    """Sweep parameters are inconsistent (e.g. alpha < p)."""


class ExportError(YamabeError):
    """Serialized output does not read back in the fixed layout."""
