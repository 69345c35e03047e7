"""
Core module containing constants, exceptions, and shared domain types for HeartPath.
"""

from .constants import *
from .exceptions import *
from .sequences import (
    ProbabilityMatrix,
    CyclicTransitionModel,
    DecodedSequence,
    WindowDecodeResult,
    validate_probability_matrix,
    is_valid_sequence,
    encode_one_hot,
)

__all__ = [
    # Constants
    'ROW_SUM_TOLERANCE',
    'DEFAULT_RATE_HZ',
    'DEFAULT_TOLERANCE_MS',
    'EXIT_OK',
    'EXIT_USAGE',
    'EXIT_VALIDATION',

    # Exceptions
    'HeartPathError',
    'ConfigurationError',
    'DataFileError',
    'WriteFailureError',
    'ValidationError',
    'NonRectangularError',
    'RowNotNormalizedError',
    'NegativeEntryError',
    'TooFewStatesError',
    'StateOutOfRangeError',
    'DimensionMismatchError',
    'WindowTooLongError',
    'InstanceTooLargeError',
    'ShapeMismatchError',
    'NonFiniteInputError',
    'LengthMismatchError',
    'EmptyEvaluationRangeError',
    'InvalidConfigError',

    # Domain types
    'ProbabilityMatrix',
    'CyclicTransitionModel',
    'DecodedSequence',
    'WindowDecodeResult',
    'validate_probability_matrix',
    'is_valid_sequence',
    'encode_one_hot',
]
