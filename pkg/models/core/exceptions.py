"""
Custom exception classes for HeartPath.

Every error raised by the library derives from HeartPathError. Two families
carry the exit code the CLI reports: file and configuration problems exit with
2, validation and domain problems exit with 3.
"""

from typing import Optional, Any

from models.core.constants import EXIT_USAGE, EXIT_VALIDATION


class HeartPathError(Exception):
    """Base exception class for all HeartPath errors."""

    exit_code = EXIT_USAGE

    def __init__(self, message: str, details: Optional[str] = None, error_code: Optional[str] = None):
        """
        Initialize the base exception.

        Args:
            message: Human-readable error message
            details: Additional error details for debugging
            error_code: Machine-readable error code for categorization
        """
        super().__init__(message)
        self.message = message
        self.details = details
        self.error_code = error_code

    def __str__(self) -> str:
        """Return a formatted error message."""
        if self.details:
            return f"{self.message}. Details: {self.details}"
        return self.message


class ConfigurationError(HeartPathError):
    """Raised when configuration-related operations fail."""

    def __init__(self, message: str, config_path: Optional[str] = None, **kwargs):
        """
        Initialize configuration error.

        Args:
            message: Error message
            config_path: Path to the problematic configuration file
            **kwargs: Additional arguments passed to base class
        """
        super().__init__(message, **kwargs)
        self.config_path = config_path


class DataFileError(HeartPathError):
    """Raised when an input file cannot be read or parsed."""

    def __init__(self, message: str, path: Optional[str] = None, line: Optional[int] = None, **kwargs):
        """
        Initialize data file error.

        Args:
            message: Error message
            path: Path of the offending file
            line: 1-based line number where parsing failed (if applicable)
            **kwargs: Additional arguments passed to base class
        """
        super().__init__(message, **kwargs)
        self.path = path
        self.line = line


class WriteFailureError(DataFileError):
    """Raised when an output file cannot be written."""


class ValidationError(HeartPathError):
    """Raised when data validation fails."""

    exit_code = EXIT_VALIDATION

    def __init__(self, message: str, field_name: Optional[str] = None, invalid_value: Optional[Any] = None, **kwargs):
        """
        Initialize validation error.

        Args:
            message: Error message
            field_name: Name of the field that failed validation
            invalid_value: The value that failed validation
            **kwargs: Additional arguments passed to base class
        """
        super().__init__(message, **kwargs)
        self.field_name = field_name
        self.invalid_value = invalid_value


class NonRectangularError(ValidationError):
    """Raised when a matrix has rows of different lengths or no rows at all."""


class RowNotNormalizedError(ValidationError):
    """Raised when a probability row does not sum to one."""

    def __init__(self, message: str, row: int, total: float, **kwargs):
        super().__init__(message, field_name="p", invalid_value=total, **kwargs)
        self.row = row
        self.total = total


class NegativeEntryError(ValidationError):
    """Raised when a probability matrix holds a negative entry."""

    def __init__(self, message: str, row: int, column: int, **kwargs):
        super().__init__(message, field_name="p", **kwargs)
        self.row = row
        self.column = column


class TooFewStatesError(ValidationError):
    """Raised when fewer than two states are requested."""


class StateOutOfRangeError(ValidationError):
    """Raised when a state index falls outside [0, L)."""


class DimensionMismatchError(ValidationError):
    """Raised when a matrix and a transition model disagree on L."""


class WindowTooLongError(ValidationError):
    """Raised when the requested window is wider than the signal."""


class InstanceTooLargeError(ValidationError):
    """Raised when a brute-force oracle is asked to enumerate a large instance."""


class ShapeMismatchError(ValidationError):
    """Raised when weight or feature shapes are inconsistent."""


class NonFiniteInputError(ValidationError):
    """Raised when NaN or infinite values reach a computation."""


class LengthMismatchError(ValidationError):
    """Raised when two state sequences that must align have different lengths."""


class EmptyEvaluationRangeError(ValidationError):
    """Raised when the evaluated range holds no samples."""


class InvalidConfigError(ValidationError):
    """Raised when a generator or experiment configuration is inconsistent."""


# Convenience functions for creating common errors

def row_not_normalized(row: int, total: float) -> RowNotNormalizedError:
    """Create a standardized row normalization error."""
    return RowNotNormalizedError(
        f"Row {row} is not normalized (sum {total:.9g})",
        row=row,
        total=total,
        error_code="ROW_NOT_NORMALIZED"
    )


def dimension_mismatch(matrix_states: int, model_states: int) -> DimensionMismatchError:
    """Create a standardized matrix/model dimension error."""
    return DimensionMismatchError(
        f"Probability matrix has {matrix_states} states but the transition model has {model_states}",
        field_name="n_states",
        invalid_value=matrix_states,
        error_code="DIMENSION_MISMATCH"
    )


def window_too_long(width: int, n_samples: int) -> WindowTooLongError:
    """Create a standardized window length error."""
    return WindowTooLongError(
        f"Window of {width} samples does not fit in {n_samples} samples",
        field_name="width",
        invalid_value=width,
        error_code="WINDOW_TOO_LONG"
    )


def instance_too_large(what: str, value: int, limit: int) -> InstanceTooLargeError:
    """Create a standardized oracle size guard error."""
    return InstanceTooLargeError(
        f"Brute-force oracle refuses {what}={value} (limit {limit})",
        field_name=what,
        invalid_value=value,
        error_code="INSTANCE_TOO_LARGE"
    )


def file_parse_failed(path: str, line: Optional[int], details: str) -> DataFileError:
    """Create a standardized file parse error."""
    location = f"{path}:{line}" if line is not None else path
    return DataFileError(
        f"Failed to parse {location}",
        path=path,
        line=line,
        details=details,
        error_code="FILE_PARSE_FAILED"
    )


def file_write_failed(path: str, details: str) -> WriteFailureError:
    """Create a standardized file write error."""
    return WriteFailureError(
        f"Failed to write {path}",
        path=path,
        details=details,
        error_code="WRITE_FAILED"
    )
