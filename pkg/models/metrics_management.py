"""
Evaluation of an estimated state sequence against ground truth.

Accuracy is the fraction of samples whose state agrees. Events are maximal
runs of one state; an estimated event matches a ground-truth event of the same
state when their centers are closer than the tolerance. Matched events of the
positive states are true positives, unmatched estimated ones false positives,
unmatched ground-truth ones false negatives. Matched events of the negative
states are true negatives; unmatched negative ground-truth events are counted
nowhere.
"""
import logging
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from models.core.constants import DEFAULT_TOLERANCE_MS, MS_PER_SECOND
from models.core.exceptions import ValidationError, LengthMismatchError, EmptyEvaluationRangeError
from models.data_models import MetricsReport

logger = logging.getLogger(__name__)

Window = Tuple[int, int]


@dataclass(frozen=True)
class Event:
    """A maximal run of `state` over samples [start, end], both inclusive"""
    state: int
    start: int
    end: int

    @property
    def center(self) -> float:
        return (self.start + self.end) / 2


EventSet = Tuple[Event, ...]


def extract_events(states: Sequence[int], restrict: Optional[Window] = None) -> EventSet:
    """Run-length events, optionally keeping only those centered in [start, stop)"""
    seq = np.asarray(states, dtype=int)
    if seq.size == 0:
        return ()
    boundaries = np.flatnonzero(np.diff(seq)) + 1
    starts = np.concatenate([[0], boundaries])
    ends = np.concatenate([boundaries - 1, [seq.size - 1]])
    events = tuple(Event(state=int(seq[s]), start=int(s), end=int(e)) for s, e in zip(starts, ends))
    if restrict is not None:
        lo, hi = restrict
        events = tuple(ev for ev in events if lo <= ev.center < hi)
    return events


def match_events(gt_events: Iterable[Event], est_events: Iterable[Event], states: Iterable[int],
                 tolerance_samples: float) -> List[Tuple[Event, Event]]:
    """One-to-one greedy matching, nearest centers first

    Candidate pairs share a state in `states` and lie strictly closer than
    `tolerance_samples`; they are taken in order of (distance, gt start, est
    start), skipping pairs whose events are already used.
    """
    wanted = set(states)
    gt_events = [ev for ev in gt_events if ev.state in wanted]
    est_events = [ev for ev in est_events if ev.state in wanted]

    candidates = []
    for g in gt_events:
        for e in est_events:
            if g.state != e.state:
                continue
            distance = abs(g.center - e.center)
            if distance < tolerance_samples:
                candidates.append((distance, g.start, e.start, g, e))
    candidates.sort(key=lambda c: c[:3])

    used_gt, used_est = set(), set()
    pairs = []
    for _, _, _, g, e in candidates:
        if g in used_gt or e in used_est:
            continue
        used_gt.add(g)
        used_est.add(e)
        pairs.append((g, e))
    return pairs


def _ratio(numerator: int, denominator: int) -> Tuple[float, bool]:
    if denominator == 0:
        return 1.0, False
    return numerator / denominator, True


def evaluate(gt: Sequence[int], est: Sequence[int], positive_states: Iterable[int],
             negative_states: Iterable[int], rate_hz: float,
             tolerance_ms: float = DEFAULT_TOLERANCE_MS,
             restrict: Optional[Window] = None) -> MetricsReport:
    """Accuracy, sensitivity and specificity of `est` against `gt`

    Args:
        gt: Ground-truth states
        est: Estimated states, same length
        positive_states: States whose events count as TP/FP/FN (S1, S2)
        negative_states: States whose matched events count as TN
        rate_hz: Sample frequency used to convert the tolerance
        tolerance_ms: Center distance below which events match
        restrict: Optional [start, stop) range; only its samples and the
            events centered inside it are evaluated

    Returns:
        MetricsReport: 0/0 ratios are reported as 1.0 with the matching
        `*_defined` flag set to False

    Raises:
        LengthMismatchError: gt and est differ in length
        EmptyEvaluationRangeError: restrict is empty or outside the signal
    """
    gt = np.asarray(gt, dtype=int)
    est = np.asarray(est, dtype=int)
    if gt.shape != est.shape:
        raise LengthMismatchError(
            f"Ground truth has {gt.size} samples, estimate has {est.size}",
            field_name="est",
            invalid_value=est.size
        )
    if not rate_hz > 0:
        raise ValidationError("Sample rate must be positive", field_name="rate_hz", invalid_value=rate_hz)
    T = gt.size
    lo, hi = restrict if restrict is not None else (0, T)
    if not 0 <= lo < hi <= T:
        raise EmptyEvaluationRangeError(
            f"Evaluation range [{lo}, {hi}) holds no samples of a {T}-sample signal",
            field_name="restrict",
            invalid_value=(lo, hi)
        )

    accuracy = float(np.mean(gt[lo:hi] == est[lo:hi]))
    gt_events = extract_events(gt, (lo, hi))
    est_events = extract_events(est, (lo, hi))
    tolerance_samples = tolerance_ms * rate_hz / MS_PER_SECOND

    positive = set(positive_states)
    negative = set(negative_states)
    tp = len(match_events(gt_events, est_events, positive, tolerance_samples))
    tn = len(match_events(gt_events, est_events, negative, tolerance_samples))
    fp = sum(1 for ev in est_events if ev.state in positive) - tp
    fn = sum(1 for ev in gt_events if ev.state in positive) - tp

    sensitivity, sens_defined = _ratio(tp, tp + fn)
    specificity, spec_defined = _ratio(tn, tn + fp)
    if not sens_defined:
        logger.warning("Sensitivity undefined (no positive ground-truth events); reported as 1.0")
    if not spec_defined:
        logger.warning("Specificity undefined (no negative matches and no false positives); reported as 1.0")

    return MetricsReport(
        accuracy=accuracy,
        sensitivity=sensitivity,
        specificity=specificity,
        tp=tp,
        fp=fp,
        tn=tn,
        fn=fn,
        sensitivity_defined=sens_defined,
        specificity_defined=spec_defined,
        tolerance_ms=tolerance_ms,
        evaluated_range=(lo, hi)
    )
