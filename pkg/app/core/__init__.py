from app.core.exceptions import (
    AppException,
    DegenerateFilterException,
    DimensionMismatchException,
    FilteredToZeroException,
    FilterException,
    IncompleteBasisSetException,
    InvalidStateException,
    LinearAlgebraException,
    NotHermitianException,
    NotPositiveSemidefiniteException,
    OutputWriteException,
    TomographyException,
    ValidationException,
)
from app.core.logging import get_logger, setup_logging

__all__ = [
    "AppException",
    "DegenerateFilterException",
    "DimensionMismatchException",
    "FilteredToZeroException",
    "FilterException",
    "IncompleteBasisSetException",
    "InvalidStateException",
    "LinearAlgebraException",
    "NotHermitianException",
    "NotPositiveSemidefiniteException",
    "OutputWriteException",
    "TomographyException",
    "ValidationException",
    "get_logger",
    "setup_logging",
]
