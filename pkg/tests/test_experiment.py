import pytest
import numpy as np

from models.core.exceptions import InvalidConfigError, ValidationError, WindowTooLongError
from models.core.sequences import ProbabilityMatrix
from models.data_models import MetricsReport, RunRow
from models.experiment_management import METHODS, compare_recording, run_compare, aggregate, single_run_report
from models.io_management import CorpusRecording
from models.window_management import WindowSpec
from tests.test_base import make_recording, one_hot_matrix

POSITIVE, NEGATIVE = [0, 2], [1, 3]


@pytest.fixture
def recordings():
    return [make_recording(f"rec_{i:03d}", seed=10 + i, duration_s=6) for i in (2, 0, 1)]


def _metrics(accuracy, sensitivity=1.0, specificity=1.0):
    return MetricsReport(accuracy=accuracy, sensitivity=sensitivity, specificity=specificity,
                         tp=1, fp=0, tn=1, fn=0, tolerance_ms=60)


class TestCompareRecording:
    def test_rows_in_method_order(self, recordings):
        rows = compare_recording(recordings[0], WindowSpec(seconds=2), POSITIVE, NEGATIVE, 60, trials=3, seed=0)
        assert [row.method for row in rows] == list(METHODS)
        assert {row.recording for row in rows} == {"rec_002"}
        window_row = rows[METHODS.index("window_decode")]
        assert window_row.metrics.evaluated_range == (0, 100)

    def test_perfect_estimate(self):
        gt = [0] * 10 + [1] * 10 + [2] * 10 + [3] * 20
        rec = CorpusRecording(name="rec_000", gt=np.array(gt), P=one_hot_matrix(gt, 4))
        rows = compare_recording(rec, WindowSpec(width_samples=20), POSITIVE, NEGATIVE, 60, trials=5, seed=1)
        for row in rows:
            assert row.metrics.accuracy == 1.0

    def test_random_trials_pool_counts(self, recordings):
        spec = WindowSpec(seconds=1)
        one = compare_recording(recordings[1], spec, POSITIVE, NEGATIVE, 60, trials=1, seed=3)[3].metrics
        many = compare_recording(recordings[1], spec, POSITIVE, NEGATIVE, 60, trials=20, seed=3)[3].metrics
        assert many.tp + many.fn >= one.tp + one.fn
        assert 0.0 <= many.accuracy <= 1.0

    def test_needs_rate(self):
        gt = [0, 1, 2, 3]
        P = ProbabilityMatrix(p=one_hot_matrix(gt, 4).p, rate_hz=None)
        rec = CorpusRecording(name="rec_000", gt=np.array(gt), P=P)
        with pytest.raises(ValidationError):
            compare_recording(rec, WindowSpec(width_samples=2), POSITIVE, NEGATIVE, 60, trials=1, seed=0)

    def test_length_disagreement(self, recordings):
        rec = recordings[0]
        short = CorpusRecording(name=rec.name, gt=rec.gt[:-1], P=rec.P)
        with pytest.raises(ValidationError):
            compare_recording(short, WindowSpec(seconds=1), POSITIVE, NEGATIVE, 60, trials=1, seed=0)

    def test_window_too_long(self, recordings):
        with pytest.raises(WindowTooLongError):
            compare_recording(recordings[0], WindowSpec(seconds=7), POSITIVE, NEGATIVE, 60, trials=1, seed=0)


class TestRunCompare:
    def test_rows_sorted_by_recording(self, recordings):
        report = run_compare(recordings, WindowSpec(seconds=2), POSITIVE, NEGATIVE, 60, trials=2, seed=4)
        names = [row.recording for row in report.rows]
        assert names == sorted(names)
        assert len(report.rows) == 3 * len(METHODS)
        assert list(report.aggregates) == list(METHODS)
        assert all(agg.count == 3 for agg in report.aggregates.values())

    def test_deterministic(self, recordings):
        spec = WindowSpec(seconds=2)
        a = run_compare(recordings, spec, POSITIVE, NEGATIVE, 60, trials=4, seed=7)
        b = run_compare(list(reversed(recordings)), spec, POSITIVE, NEGATIVE, 60, trials=4, seed=7)
        assert a == b

    @pytest.mark.slow
    def test_workers_match_serial(self, recordings):
        spec = WindowSpec(seconds=2)
        serial = run_compare(recordings, spec, POSITIVE, NEGATIVE, 60, trials=4, seed=7)
        parallel = run_compare(recordings, spec, POSITIVE, NEGATIVE, 60, trials=4, seed=7, workers=2)
        assert serial.rows == parallel.rows

    def test_parameters_recorded(self, recordings):
        report = run_compare(recordings[:1], WindowSpec(seconds=1), POSITIVE, NEGATIVE, 60,
                             parameters={"trials": 1})
        assert report.parameters == {"trials": 1}

    def test_invalid_arguments(self, recordings):
        with pytest.raises(InvalidConfigError):
            run_compare(recordings, WindowSpec(seconds=1), POSITIVE, NEGATIVE, 60, trials=0)
        with pytest.raises(InvalidConfigError):
            run_compare([], WindowSpec(seconds=1), POSITIVE, NEGATIVE, 60)


class TestAggregate:
    def test_mean_and_median(self):
        rows = [RunRow(recording=f"r{i}", method="m", metrics=_metrics(acc, sens))
                for i, (acc, sens) in enumerate([(0.2, 1.0), (0.4, 0.5), (0.9, 0.0)])]
        agg = aggregate(rows)["m"]
        assert agg.count == 3
        assert agg.mean_accuracy == pytest.approx(0.5)
        assert agg.median_accuracy == pytest.approx(0.4)
        assert agg.mean_sensitivity == pytest.approx(0.5)
        assert agg.median_specificity == 1.0

    def test_groups_by_method(self):
        rows = [RunRow(recording="r", method=m, metrics=_metrics(0.5)) for m in ("a", "b", "a")]
        result = aggregate(rows)
        assert (result["a"].count, result["b"].count) == (2, 1)

    def test_single_run_report(self):
        report = single_run_report("est", "estimate", _metrics(0.75), parameters={"gt": "gt.csv"})
        assert len(report.rows) == 1
        assert report.aggregates["estimate"].mean_accuracy == 0.75
        assert report.parameters["gt"] == "gt.csv"
