"""Exception hierarchy for the graph_match library.

Every error carries a human-readable message plus a ``details`` dict with the
structured context (file, line, ids, shapes) that the CLI logs and that tests
can assert on. ``exit_code`` is the process exit status the CLI maps the error to.
"""

from typing import Any


class GraphMatchError(Exception):
    """Base exception for graph_match errors.

    Args:
        message: Error message
        details: Optional additional error details
    """

    exit_code = 3

    def __init__(self, message: str, details: dict[str, Any] | None = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}


class ParseError(GraphMatchError):
    """Raised when an input file is malformed.

    Args:
        message: Error message
        path: File being read
        line_number: 1-based line number of the offending line
    """

    def __init__(self, message: str, path: str | None = None, line_number: int | None = None):
        location = f"{path}:{line_number}" if path and line_number else (path or "")
        super().__init__(
            f"{location}: {message}" if location else message,
            details={"path": path, "line_number": line_number},
        )
        self.path = path
        self.line_number = line_number


class ValidationError(GraphMatchError):
    """Raised when loaded data violates a structural invariant."""

    pass


class NodeNotFoundError(GraphMatchError):
    """Raised when a node id is unknown or has the wrong kind."""

    pass


class ShapeError(GraphMatchError):
    """Raised when tensor shapes or model dimensions do not line up."""

    pass


class ConstructionError(GraphMatchError):
    """Raised when a pair graph is internally inconsistent."""

    pass


class PartitionError(GraphMatchError):
    """Raised when a requested split cannot be produced."""

    pass


class StateError(GraphMatchError):
    """Raised when an operation is called in the wrong state (e.g. backward before forward)."""

    pass


class ArgumentError(GraphMatchError, ValueError):
    """Raised for invalid call arguments (empty inputs, out-of-range indices)."""

    exit_code = 2


class NumericError(GraphMatchError):
    """Raised when a tensor contains NaN or Inf."""

    exit_code = 4


class NonFiniteLossError(NumericError):
    """Raised when training produces a non-finite loss.

    Args:
        step: Global optimizer step
        lr: Learning rate at that step
        grad_norms: Gradient norm per parameter tensor
    """

    def __init__(self, step: int, lr: float, grad_norms: dict[str, float]):
        super().__init__(
            f"Non-finite loss at step {step} (lr={lr:.3e})",
            details={"step": step, "lr": lr, "grad_norms": grad_norms},
        )
        self.step = step
        self.lr = lr
        self.grad_norms = grad_norms
