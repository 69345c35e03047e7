"""
Domain types shared by the decoders, the oracles, the metrics and the CLI.

States are 0-indexed. All types are immutable after construction: numpy
arrays held by them are flagged read-only.
"""

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from models.core.constants import MIN_STATES, ROW_SUM_TOLERANCE, RENORMALIZE_LOG_THRESHOLD
from models.core.exceptions import (
    ValidationError, NonRectangularError, NegativeEntryError, TooFewStatesError,
    StateOutOfRangeError, NonFiniteInputError, row_not_normalized
)

logger = logging.getLogger(__name__)

MatrixLike = Union[np.ndarray, Sequence[Sequence[float]]]


def _readonly(array: np.ndarray) -> np.ndarray:
    array.flags.writeable = False
    return array


@dataclass(frozen=True)
class ProbabilityMatrix:
    """T x L per-sample state output distribution"""
    p: np.ndarray
    rate_hz: Optional[float] = None
    state_names: Optional[Tuple[str, ...]] = None

    @property
    def n_samples(self) -> int:
        return int(self.p.shape[0])

    @property
    def n_states(self) -> int:
        return int(self.p.shape[1])

    def submatrix(self, start: int, stop: int) -> 'ProbabilityMatrix':
        """Rows [start, stop) as a matrix of its own"""
        if not 0 <= start < stop <= self.n_samples:
            raise ValidationError(
                f"Row range [{start}, {stop}) outside [0, {self.n_samples})",
                field_name="range",
                invalid_value=(start, stop)
            )
        return ProbabilityMatrix(p=self.p[start:stop], rate_hz=self.rate_hz, state_names=self.state_names)


@dataclass(frozen=True)
class CyclicTransitionModel:
    """L states where state s may only persist or advance to (s + 1) mod L"""
    n_states: int
    state_names: Optional[Tuple[str, ...]] = None

    def __post_init__(self):
        if self.n_states < MIN_STATES:
            raise TooFewStatesError(
                f"A cyclic transition model needs at least {MIN_STATES} states, got {self.n_states}",
                field_name="n_states",
                invalid_value=self.n_states
            )
        if self.state_names is not None and len(self.state_names) != self.n_states:
            raise ValidationError(
                f"Expected {self.n_states} state names, got {len(self.state_names)}",
                field_name="state_names",
                invalid_value=self.state_names
            )

    def successors(self, state: int) -> Tuple[int, int]:
        self._check_state(state)
        return state, (state + 1) % self.n_states

    def allows(self, current: int, following: int) -> bool:
        return (following - current) % self.n_states in (0, 1)

    def adjacency(self) -> np.ndarray:
        """The Q matrix: ones at (s, s) and (s, s + 1 mod L)"""
        q = np.eye(self.n_states, dtype=int)
        q[np.arange(self.n_states), (np.arange(self.n_states) + 1) % self.n_states] = 1
        return q

    def _check_state(self, state: int) -> None:
        if not 0 <= state < self.n_states:
            raise StateOutOfRangeError(
                f"State {state} outside [0, {self.n_states})",
                field_name="state",
                invalid_value=state
            )


@dataclass(frozen=True)
class DecodedSequence:
    """A full-length state assignment and its summed probability"""
    states: Tuple[int, ...]
    objective: float

    def __len__(self) -> int:
        return len(self.states)

    def is_valid(self, model: CyclicTransitionModel) -> bool:
        return is_valid_sequence(model, self.states)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.states, dtype=int)


@dataclass(frozen=True)
class WindowDecodeResult:
    """The best contiguous window of `width` samples and its in-window assignment"""
    start: int
    width: int
    states: Tuple[int, ...]
    objective: float
    n_samples: int
    n_candidates: int = field(default=0, compare=False)

    @property
    def stop(self) -> int:
        return self.start + self.width

    @property
    def mask(self) -> np.ndarray:
        """b_t: 1 outside the window, 0 inside"""
        b = np.ones(self.n_samples, dtype=int)
        b[self.start:self.stop] = 0
        return b

    def to_full_length(self, fill: int = -1) -> np.ndarray:
        full = np.full(self.n_samples, fill, dtype=int)
        full[self.start:self.stop] = self.states
        return full


def validate_probability_matrix(raw: MatrixLike,
                                rate_hz: Optional[float] = None,
                                state_names: Optional[Sequence[str]] = None,
                                tolerance: float = ROW_SUM_TOLERANCE) -> ProbabilityMatrix:
    """Validate a raw T x L matrix and return an immutable ProbabilityMatrix

    Rows within `tolerance` of summing to one are renormalized; rows further
    away are rejected.

    Args:
        raw: Nested sequence or 2-D array of probabilities
        rate_hz: Optional sample frequency F
        state_names: Optional state labels, one per column
        tolerance: Allowed distance of a row sum from 1

    Returns:
        ProbabilityMatrix: the validated matrix

    Raises:
        NonRectangularError: Ragged or empty input
        TooFewStatesError: Fewer than two columns
        NonFiniteInputError: NaN or infinite entries
        NegativeEntryError: Negative entries
        RowNotNormalizedError: A row sum farther than `tolerance` from 1
    """
    if isinstance(raw, np.ndarray):
        if raw.ndim != 2:
            raise NonRectangularError(f"Expected a 2-D matrix, got {raw.ndim} dimension(s)")
        p = np.array(raw, dtype=np.float64)
    else:
        rows = [list(r) for r in raw]
        if not rows:
            raise NonRectangularError("Probability matrix has no rows")
        width = len(rows[0])
        for t, r in enumerate(rows):
            if len(r) != width:
                raise NonRectangularError(
                    f"Row {t} has {len(r)} entries, expected {width}",
                    field_name="p",
                    invalid_value=t
                )
        p = np.array(rows, dtype=np.float64)

    if p.shape[0] == 0:
        raise NonRectangularError("Probability matrix has no rows")
    if p.shape[1] < MIN_STATES:
        raise TooFewStatesError(
            f"Probability matrix needs at least {MIN_STATES} states, got {p.shape[1]}",
            field_name="n_states",
            invalid_value=p.shape[1]
        )
    if not np.all(np.isfinite(p)):
        t, s = np.argwhere(~np.isfinite(p))[0]
        raise NonFiniteInputError(f"Non-finite entry at row {t}, column {s}", field_name="p")
    if np.any(p < 0):
        t, s = np.argwhere(p < 0)[0]
        raise NegativeEntryError(f"Negative entry {p[t, s]} at row {t}, column {s}", row=int(t), column=int(s))

    totals = p.sum(axis=1)
    off = np.abs(totals - 1.0)
    if np.any(off > tolerance):
        t = int(np.argmax(off > tolerance))
        raise row_not_normalized(t, float(totals[t]))
    if np.any(off > RENORMALIZE_LOG_THRESHOLD):
        logger.warning(f"Renormalizing {int(np.sum(off > RENORMALIZE_LOG_THRESHOLD))} row(s) within tolerance")
        p = p / totals[:, None]

    if rate_hz is not None and not rate_hz > 0:
        raise ValidationError("Sample rate must be positive", field_name="rate_hz", invalid_value=rate_hz)
    names = tuple(state_names) if state_names is not None else None
    if names is not None and len(names) != p.shape[1]:
        raise ValidationError(
            f"Expected {p.shape[1]} state names, got {len(names)}",
            field_name="state_names",
            invalid_value=names
        )

    return ProbabilityMatrix(p=_readonly(p), rate_hz=float(rate_hz) if rate_hz is not None else None, state_names=names)


def is_valid_sequence(model: CyclicTransitionModel, states: Sequence[int]) -> bool:
    """Check that every adjacent pair (u, v) satisfies v in {u, (u + 1) mod L}

    Raises:
        ValidationError: Empty sequence
        StateOutOfRangeError: An entry outside [0, L)
    """
    seq = np.asarray(states, dtype=int)
    if seq.size == 0:
        raise ValidationError("State sequence is empty", field_name="states")
    bad = (seq < 0) | (seq >= model.n_states)
    if np.any(bad):
        index = int(np.argmax(bad))
        raise StateOutOfRangeError(
            f"State {int(seq[index])} at position {index} outside [0, {model.n_states})",
            field_name="states",
            invalid_value=int(seq[index])
        )
    steps = np.mod(np.diff(seq), model.n_states)
    return bool(np.all(steps <= 1))


def encode_one_hot(states: Sequence[int], n_states: int) -> np.ndarray:
    """T x L 0/1 matrix with a single one per row"""
    seq = np.asarray(states, dtype=int)
    a = np.zeros((seq.size, n_states), dtype=int)
    a[np.arange(seq.size), seq] = 1
    return a
