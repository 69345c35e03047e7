"""
Optimal region selection: the contiguous window of W samples whose
constrained decode has the largest summed probability.

Windows may start at the first sample and end at the last one. Two exact
methods are provided: a vectorized pass over all starts at once, and an
independent decode per start that can be spread over worker processes.
"""
import logging
import math
from typing import List, Optional, Tuple

import numpy as np
from joblib import Parallel, delayed
from pydantic import BaseModel, Field, model_validator
from tqdm import tqdm

from models.core.sequences import ProbabilityMatrix, CyclicTransitionModel, WindowDecodeResult
from models.core.exceptions import ValidationError, dimension_mismatch, window_too_long
from models.decode_management import advance_scores, best_constrained_value, viterbi_decode

logger = logging.getLogger(__name__)


class WindowSpec(BaseModel):
    """Window width given either in seconds (with a rate) or in samples"""
    seconds: Optional[float] = Field(default=None, ge=0)
    rate_hz: Optional[float] = Field(default=None, gt=0)
    width_samples: Optional[int] = None

    @model_validator(mode="after")
    def _one_width_source(self) -> 'WindowSpec':
        if (self.seconds is None) == (self.width_samples is None):
            raise ValueError("exactly one of seconds or width_samples must be given")
        return self

    def resolve(self, n_samples: int, rate_hz: Optional[float] = None) -> int:
        """Resolve W, checking 1 <= W <= T

        Seconds are converted with round-half-away-from-zero; the rate falls
        back to `rate_hz` (typically the matrix's own rate) when the WindowSpec has
        none.

        Raises:
            ValidationError: No rate for a seconds-based spec, or W < 1
            WindowTooLongError: W > T
        """
        if self.width_samples is not None:
            width = self.width_samples
        else:
            rate = self.rate_hz if self.rate_hz is not None else rate_hz
            if rate is None:
                raise ValidationError(
                    "A window given in seconds needs a sample rate",
                    field_name="rate_hz"
                )
            width = int(math.floor(self.seconds * rate + 0.5))
        if width < 1:
            raise ValidationError(
                f"Window must cover at least one sample, got {width}",
                field_name="width",
                invalid_value=width
            )
        if width > n_samples:
            raise window_too_long(width, n_samples)
        return width


def _candidate_starts(n_samples: int, width: int, exclude_boundaries: bool) -> np.ndarray:
    if exclude_boundaries:
        if width > n_samples - 2:
            raise ValidationError(
                f"Excluding both boundaries needs W <= T - 2, got W={width}, T={n_samples}",
                field_name="width",
                invalid_value=width
            )
        return np.arange(1, n_samples - width)
    return np.arange(0, n_samples - width + 1)


def _prepare(P: ProbabilityMatrix, model: CyclicTransitionModel, spec: WindowSpec) -> int:
    if P.n_states != model.n_states:
        raise dimension_mismatch(P.n_states, model.n_states)
    return spec.resolve(P.n_samples, P.rate_hz)


def window_values(P: ProbabilityMatrix, width: int, starts: Optional[np.ndarray] = None) -> np.ndarray:
    """Best in-window constrained objective for every start, in one pass

    Row k of the DP advances all candidate windows by one offset together,
    so the arithmetic per window is the same as decoding it on its own.
    """
    if starts is None:
        starts = np.arange(0, P.n_samples - width + 1)
    scores = P.p[starts].copy()
    for k in range(1, width):
        best, _ = advance_scores(scores)
        scores = best + P.p[starts + k]
    return scores.max(axis=1)


def _pick(values: np.ndarray, starts: np.ndarray) -> int:
    # np.argmax returns the first maximum: the earliest start wins ties
    return int(starts[int(np.argmax(values))])


def _result(P: ProbabilityMatrix, model: CyclicTransitionModel, start: int, width: int,
            n_candidates: int) -> WindowDecodeResult:
    decoded = viterbi_decode(P.submatrix(start, start + width), model)
    return WindowDecodeResult(
        start=start,
        width=width,
        states=decoded.states,
        objective=decoded.objective,
        n_samples=P.n_samples,
        n_candidates=n_candidates
    )


def window_decode(P: ProbabilityMatrix, model: CyclicTransitionModel, spec: WindowSpec,
                  exclude_boundaries: bool = False) -> WindowDecodeResult:
    """Select the best window of W samples and decode it

    Args:
        P: Validated probability matrix
        model: Transition model with the same number of states
        spec: Window width
        exclude_boundaries: Forbid windows touching the first or the last sample

    Returns:
        WindowDecodeResult: earliest start among equal objectives

    Raises:
        WindowTooLongError: W > T
        DimensionMismatchError: P and model disagree on L
    """
    width = _prepare(P, model, spec)
    starts = _candidate_starts(P.n_samples, width, exclude_boundaries)
    values = window_values(P, width, starts)
    start = _pick(values, starts)
    result = _result(P, model, start, width, n_candidates=len(starts))
    logger.debug(f"Best window: start={result.start}, width={width}, objective={result.objective:.6f}")
    return result


def _chunk_values(p_rows: np.ndarray, starts: List[int], width: int) -> List[Tuple[float, int]]:
    return [(best_constrained_value(p_rows[s:s + width]), s) for s in starts]


def window_decode_per_start(P: ProbabilityMatrix, model: CyclicTransitionModel, spec: WindowSpec,
                            exclude_boundaries: bool = False, workers: int = 1,
                            progress: bool = False) -> WindowDecodeResult:
    """Decode every candidate window independently and keep the best one

    Each start is its own acyclic graph; evaluations are independent and are
    split into contiguous chunks over `workers` processes. Results merge by
    (objective desc, start asc), so the outcome does not depend on
    scheduling and equals window_decode.
    """
    width = _prepare(P, model, spec)
    starts = [int(s) for s in _candidate_starts(P.n_samples, width, exclude_boundaries)]
    n_chunks = max(1, min(len(starts), workers * 4))
    chunks = [[int(s) for s in c] for c in np.array_split(np.asarray(starts), n_chunks) if len(c)]

    if workers > 1:
        logger.info(f"Evaluating {len(starts)} window starts on {workers} workers")
        parts = Parallel(n_jobs=workers)(delayed(_chunk_values)(P.p, chunk, width) for chunk in chunks)
    else:
        parts = [_chunk_values(P.p, chunk, width) for chunk in tqdm(chunks, desc="Window starts", disable=not progress)]

    best_value, best_start = None, None
    for part in parts:
        for value, start in part:
            if best_value is None or value > best_value or (value == best_value and start < best_start):
                best_value, best_start = value, start
    return _result(P, model, best_start, width, n_candidates=len(starts))
