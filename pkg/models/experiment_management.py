"""
Comparison runs over a corpus: full-signal argmax against windowed decoding.

For every recording four estimates are scored:

    argmax_full           per-sample argmax over the whole recording
    window_decode         constrained decode of the optimal window
    argmax_window         per-sample argmax inside the optimal window
    argmax_random_window  per-sample argmax inside random windows of the same width

The three windowed methods are scored on the window's samples only.
"""
import logging
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np
from joblib import Parallel, delayed
from tqdm import tqdm

from models.core.sequences import CyclicTransitionModel
from models.core.exceptions import ValidationError, InvalidConfigError
from models.data_models import MetricsReport, RunRow, MethodAggregate, RunReport
from models.decode_management import argmax_decode
from models.io_management import CorpusRecording
from models.metrics_management import evaluate
from models.window_management import WindowSpec, window_decode, window_decode_per_start

logger = logging.getLogger(__name__)

METHODS = ("argmax_full", "window_decode", "argmax_window", "argmax_random_window")


def _pooled(reports: Sequence[MetricsReport], tolerance_ms: float) -> MetricsReport:
    """Pool counts over equally wide windows; accuracy is their mean"""
    tp = sum(r.tp for r in reports)
    fp = sum(r.fp for r in reports)
    tn = sum(r.tn for r in reports)
    fn = sum(r.fn for r in reports)
    return MetricsReport(
        accuracy=float(np.mean([r.accuracy for r in reports])),
        sensitivity=tp / (tp + fn) if tp + fn else 1.0,
        specificity=tn / (tn + fp) if tn + fp else 1.0,
        tp=tp, fp=fp, tn=tn, fn=fn,
        sensitivity_defined=tp + fn > 0,
        specificity_defined=tn + fp > 0,
        tolerance_ms=tolerance_ms
    )


def compare_recording(recording: CorpusRecording, spec: WindowSpec, positive_states: Iterable[int],
                      negative_states: Iterable[int], tolerance_ms: float, trials: int, seed: int,
                      index: int = 0, per_start: bool = False) -> List[RunRow]:
    """Score the four methods on one recording

    Args:
        recording: Ground truth and probability matrix (with a rate)
        spec: Window width
        trials: Random windows drawn for argmax_random_window
        seed: Experiment seed; random windows use the stream [seed, index]
        index: Position of the recording in the corpus
        per_start: Use the per-start window decoder

    Raises:
        ValidationError: The matrix has no rate, or lengths disagree
        WindowTooLongError: W > T
    """
    P, gt = recording.P, np.asarray(recording.gt, dtype=int)
    if P.rate_hz is None:
        raise ValidationError(f"Recording {recording.name} has no sample rate", field_name="rate_hz")
    if gt.size != P.n_samples:
        raise ValidationError(
            f"Recording {recording.name}: {gt.size} ground-truth states for {P.n_samples} samples",
            field_name="gt",
            invalid_value=gt.size
        )
    positive, negative = list(positive_states), list(negative_states)
    model = CyclicTransitionModel(P.n_states, P.state_names)

    def score(truth: np.ndarray, est: Sequence[int]) -> MetricsReport:
        return evaluate(truth, est, positive, negative, P.rate_hz, tolerance_ms)

    argmax = argmax_decode(P).as_array()
    decoder = window_decode_per_start if per_start else window_decode
    window = decoder(P, model, spec)
    lo, hi = window.start, window.stop

    rng = np.random.default_rng([seed, index])
    random_reports = []
    for start in rng.integers(0, P.n_samples - window.width, size=trials, endpoint=True):
        stop = int(start) + window.width
        random_reports.append(score(gt[start:stop], argmax[start:stop]))

    rows = {
        "argmax_full": score(gt, argmax),
        "window_decode": score(gt[lo:hi], window.states),
        "argmax_window": score(gt[lo:hi], argmax[lo:hi]),
        "argmax_random_window": _pooled(random_reports, tolerance_ms),
    }
    return [RunRow(recording=recording.name, method=method, metrics=rows[method]) for method in METHODS]


def aggregate(rows: Sequence[RunRow]) -> Dict[str, MethodAggregate]:
    """Mean and median of accuracy, sensitivity and specificity per method"""
    by_method: Dict[str, List[MetricsReport]] = {}
    for row in rows:
        by_method.setdefault(row.method, []).append(row.metrics)

    aggregates = {}
    for method, reports in by_method.items():
        acc = np.array([r.accuracy for r in reports])
        sens = np.array([r.sensitivity for r in reports])
        spec = np.array([r.specificity for r in reports])
        aggregates[method] = MethodAggregate(
            count=len(reports),
            mean_accuracy=float(np.mean(acc)),
            median_accuracy=float(np.median(acc)),
            mean_sensitivity=float(np.mean(sens)),
            median_sensitivity=float(np.median(sens)),
            mean_specificity=float(np.mean(spec)),
            median_specificity=float(np.median(spec))
        )
    return aggregates


def run_compare(recordings: Sequence[CorpusRecording], spec: WindowSpec, positive_states: Iterable[int],
                negative_states: Iterable[int], tolerance_ms: float, trials: int = 1, seed: int = 0,
                workers: int = 1, per_start: bool = False, progress: bool = False,
                parameters: Optional[dict] = None) -> RunReport:
    """Compare the four methods on every recording

    Rows are ordered by recording name then method, whatever the number of
    workers.

    Raises:
        InvalidConfigError: trials < 1 or no recordings
    """
    if trials < 1:
        raise InvalidConfigError(f"Need at least one random window trial, got {trials}",
                                 field_name="trials", invalid_value=trials)
    if not recordings:
        raise InvalidConfigError("No recordings to compare", field_name="recordings")
    positive, negative = list(positive_states), list(negative_states)
    ordered = sorted(recordings, key=lambda r: r.name)

    jobs = [
        (rec, spec, positive, negative, tolerance_ms, trials, seed, index, per_start)
        for index, rec in enumerate(ordered)
    ]
    if workers > 1:
        logger.info(f"Comparing {len(ordered)} recordings on {workers} workers")
        parts = Parallel(n_jobs=workers)(delayed(compare_recording)(*job) for job in jobs)
    else:
        parts = [compare_recording(*job) for job in tqdm(jobs, desc="Recordings", disable=not progress)]

    rows = [row for part in parts for row in part]
    report = RunReport(rows=rows, aggregates=aggregate(rows), parameters=parameters or {})
    for method in METHODS:
        agg = report.aggregates[method]
        logger.info(f"{method}: A={agg.mean_accuracy:.4f} Sens={agg.mean_sensitivity:.4f} "
                    f"Spec={agg.mean_specificity:.4f} over {agg.count} recordings")
    return report


def single_run_report(recording: str, method: str, metrics: MetricsReport,
                      parameters: Optional[dict] = None) -> RunReport:
    """A one-row report as written by the eval command"""
    rows = [RunRow(recording=recording, method=method, metrics=metrics)]
    return RunReport(rows=rows, aggregates=aggregate(rows), parameters=parameters or {})
