from typing import Any, Optional

from mapsed.types.exceptions import MapsedError


class DimensionError(MapsedError, ValueError):
    """Shapes of the operands do not fit together."""

    description = 'Dimension mismatch'

    def __init__(
        self,
        axis: str,
        expected: Any,
        actual: Any,
        operation: Optional[str] = None,
        message: Optional[str] = None,
    ) -> None:
        self.axis = axis
        self.expected = expected
        self.actual = actual
        self.operation = operation
        if message is None:
            where = f'{operation}: ' if operation else ''
            message = f'{where}axis {axis!r} expected {expected!r}, got {actual!r}'
        super().__init__(message)


class ContractViolationError(MapsedError):
    description = 'Operation called outside of its contract'
