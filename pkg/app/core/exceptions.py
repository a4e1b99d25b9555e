"""
Custom exception hierarchy for the toolkit.

All library errors inherit from AppException, so the CLI and the HTTP
layer can report them with one uniform error shape.

Hierarchy:
    AppException
    ├── LinearAlgebraException        - Shape / Hermiticity / positivity violations
    │   ├── DimensionMismatchException
    │   ├── NotHermitianException
    │   └── NotPositiveSemidefiniteException
    ├── InvalidStateException         - Density-matrix or Choi-operator invariants broken
    ├── FilterException               - Quantum filter construction / application
    │   ├── DegenerateFilterException
    │   └── FilteredToZeroException
    ├── TomographyException           - Measurement records / reconstruction
    │   └── IncompleteBasisSetException
    ├── ValidationException           - Bad parameters or inputs
    └── OutputWriteException          - Result files could not be written
"""

from typing import Any


class AppException(Exception):
    """
    Base exception for all toolkit errors.

    Attributes:
        message:     Human-readable error description.
        status_code: HTTP status code used when the error crosses the API.
        error_code:  Machine-readable error identifier (e.g. "DEGENERATE_FILTER").
        details:     Optional dict with extra context for debugging.
    """

    def __init__(
        self,
        message: str = "An unexpected error occurred.",
        status_code: int = 500,
        error_code: str = "INTERNAL_ERROR",
        details: dict[str, Any] | None = None,
    ) -> None:
        self.message = message
        self.status_code = status_code
        self.error_code = error_code
        self.details = details or {}
        super().__init__(self.message)

    def to_dict(self) -> dict[str, Any]:
        """Serialize the exception into a JSON-friendly dict."""
        payload: dict[str, Any] = {
            "error": True,
            "error_code": self.error_code,
            "message": self.message,
        }
        if self.details:
            payload["details"] = self.details
        return payload


# ─── Linear algebra ──────────────────────────────────────────────────


class LinearAlgebraException(AppException):
    """Raised when a matrix does not satisfy an operation's preconditions."""

    def __init__(
        self,
        message: str = "Linear algebra precondition violated.",
        status_code: int = 422,
        error_code: str = "LINALG_ERROR",
        details: dict[str, Any] | None = None,
    ) -> None:
        super().__init__(message, status_code, error_code, details)


class DimensionMismatchException(LinearAlgebraException):
    """Raised when operand shapes are incompatible."""

    def __init__(
        self,
        message: str = "Operand dimensions do not match.",
        details: dict[str, Any] | None = None,
    ) -> None:
        super().__init__(message=message, error_code="DIMENSION_MISMATCH", details=details)


class NotHermitianException(LinearAlgebraException):
    """Raised when a Hermitian matrix is required but not supplied."""

    def __init__(
        self,
        message: str = "Matrix is not Hermitian.",
        details: dict[str, Any] | None = None,
    ) -> None:
        super().__init__(message=message, error_code="NOT_HERMITIAN", details=details)


class NotPositiveSemidefiniteException(LinearAlgebraException):
    """Raised when an eigenvalue falls below the clamping tolerance."""

    def __init__(
        self,
        message: str = "Matrix is not positive semidefinite.",
        details: dict[str, Any] | None = None,
    ) -> None:
        super().__init__(message=message, error_code="NOT_PSD", details=details)


# ─── States ──────────────────────────────────────────────────────────


class InvalidStateException(AppException):
    """Raised when a density matrix or Choi operator breaks its invariants."""

    def __init__(
        self,
        message: str = "Invalid quantum state.",
        status_code: int = 422,
        error_code: str = "INVALID_STATE",
        details: dict[str, Any] | None = None,
    ) -> None:
        super().__init__(message, status_code, error_code, details)


# ─── Filtering ───────────────────────────────────────────────────────


class FilterException(AppException):
    """Raised when a quantum filter cannot be built or applied."""

    def __init__(
        self,
        message: str = "Quantum filter error.",
        status_code: int = 422,
        error_code: str = "FILTER_ERROR",
        details: dict[str, Any] | None = None,
    ) -> None:
        super().__init__(message, status_code, error_code, details)


class DegenerateFilterException(FilterException):
    """Raised when A − aI vanishes, so no filter can be normalized."""

    def __init__(
        self,
        message: str = "Filter operator A - aI is zero.",
        details: dict[str, Any] | None = None,
    ) -> None:
        super().__init__(message=message, error_code="DEGENERATE_FILTER", details=details)


class FilteredToZeroException(FilterException):
    """Raised when the filtered vector has (numerically) zero norm."""

    def __init__(
        self,
        message: str = "Filter annihilated the input state.",
        details: dict[str, Any] | None = None,
    ) -> None:
        super().__init__(message=message, error_code="FILTERED_TO_ZERO", details=details)


# ─── Tomography ──────────────────────────────────────────────────────


class TomographyException(AppException):
    """Raised on malformed measurement records or failed reconstructions."""

    def __init__(
        self,
        message: str = "Tomography error.",
        status_code: int = 422,
        error_code: str = "TOMOGRAPHY_ERROR",
        details: dict[str, Any] | None = None,
    ) -> None:
        super().__init__(message, status_code, error_code, details)


class IncompleteBasisSetException(TomographyException):
    """Raised when the measured bases are not tomographically complete."""

    def __init__(
        self,
        missing: list[str],
        details: dict[str, Any] | None = None,
    ) -> None:
        super().__init__(
            message=f"Measurement bases are not tomographically complete; missing {missing}.",
            error_code="INCOMPLETE_BASIS_SET",
            details={**(details or {}), "missing": missing},
        )


# ─── Validation ──────────────────────────────────────────────────────


class ValidationException(AppException):
    """Raised when parameters or inputs fail validation."""

    def __init__(
        self,
        message: str = "Validation error.",
        status_code: int = 422,
        error_code: str = "VALIDATION_ERROR",
        details: dict[str, Any] | None = None,
    ) -> None:
        super().__init__(message, status_code, error_code, details)


# ─── Output ──────────────────────────────────────────────────────────


class OutputWriteException(AppException):
    """Raised when result files cannot be written."""

    def __init__(
        self,
        path: str,
        reason: str = "Write failed.",
        details: dict[str, Any] | None = None,
    ) -> None:
        super().__init__(
            message=f"Failed to write '{path}': {reason}",
            status_code=500,
            error_code="OUTPUT_WRITE_ERROR",
            details={**(details or {}), "path": path},
        )
