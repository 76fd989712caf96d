"""Exception hierarchy shared by every module."""


class SeqDiscError(Exception):
    """Base class for all package errors."""


class DomainError(SeqDiscError, ValueError):
    """Input outside the mathematical domain of an operation."""


class CapacityError(SeqDiscError):
    """Problem size exceeds the dense-matrix size guard."""


class NotPositiveDefiniteError(DomainError):
    """Cholesky met a non-positive pivot."""

    def __init__(self, pivot: int, value: float):
        detail = "non-positive" if value != value else f"= {value:.3e}"
        super().__init__(f"matrix is not positive definite (pivot {pivot} {detail})")
        self.pivot = pivot
        self.value = value


class SolverFailure(SeqDiscError, RuntimeError):
    """An iterative routine did not converge within its iteration cap."""


class PreconditionError(SeqDiscError, ValueError):
    """An operation was called on an object in the wrong state."""


class ConsistencyError(SeqDiscError, RuntimeError):
    """Internal numerical consistency check failed."""
