from collections import Counter

import pytest
import numpy as np

from models.core.sequences import CyclicTransitionModel
from models.core.exceptions import LengthMismatchError, EmptyEvaluationRangeError, ValidationError
from models.decode_management import argmax_decode, viterbi_decode
from models.metrics_management import Event, extract_events, match_events, evaluate
from tests.test_assertions import assert_metrics_consistent
from tests.test_base import make_recording

POSITIVE = {0, 2}
NEGATIVE = {1, 3}


@pytest.fixture
def pcg_truth():
    """S1 [0,4], systole [5,9], S2 [10,14], diastole [15,29]"""
    return [0] * 5 + [1] * 5 + [2] * 5 + [3] * 15


@pytest.fixture
def spurious_estimate(pcg_truth):
    """Ground truth with a stray S1 run [20,22] inside diastole"""
    est = list(pcg_truth)
    est[20:23] = [0, 0, 0]
    return est


class TestExtractEvents:
    def test_runs(self):
        assert extract_events([0, 0, 1, 1, 1, 2]) == (Event(0, 0, 1), Event(1, 2, 4), Event(2, 5, 5))
        assert [ev.center for ev in extract_events([0, 0, 1, 1, 1, 2])] == [0.5, 3.0, 5.0]

    def test_single_state(self):
        assert extract_events([3] * 7) == (Event(3, 0, 6),)

    def test_restricted_by_center(self):
        assert extract_events([0, 0, 1, 1, 1, 2], restrict=(2, 5)) == (Event(1, 2, 4),)

    def test_empty(self):
        assert extract_events([]) == ()


class TestMatchEvents:
    def test_one_to_one(self):
        gt = [Event(0, 10, 14)]
        est = [Event(0, 9, 13), Event(0, 11, 15)]
        pairs = match_events(gt, est, {0}, tolerance_samples=3)
        assert pairs == [(Event(0, 10, 14), Event(0, 9, 13))]

    def test_nearest_first(self):
        gt = [Event(0, 0, 4), Event(0, 10, 14)]
        est = [Event(0, 8, 12)]
        assert match_events(gt, est, {0}, tolerance_samples=20) == [(Event(0, 10, 14), Event(0, 8, 12))]

    def test_state_must_agree(self):
        assert match_events([Event(0, 0, 4)], [Event(2, 0, 4)], {0, 2}, tolerance_samples=3) == []


class TestEvaluate:
    def test_identity(self, pcg_truth):
        report = evaluate(pcg_truth, pcg_truth, POSITIVE, NEGATIVE, rate_hz=50)
        assert report.accuracy == 1.0
        assert (report.tp, report.fp, report.tn, report.fn) == (2, 0, 2, 0)
        assert report.sensitivity == report.specificity == 1.0
        assert report.evaluated_range == (0, 30)

    def test_forty_ms_offset_matches(self):
        gt = [3] * 10 + [0] * 5 + [1] * 15
        est = [3] * 12 + [0] * 5 + [1] * 13
        report = evaluate(gt, est, POSITIVE, NEGATIVE, rate_hz=50)
        assert (report.tp, report.fp, report.fn) == (1, 0, 0)
        assert report.tn == 2
        assert report.accuracy == pytest.approx(26 / 30)

    def test_tolerance_is_strict(self):
        gt = [3] * 10 + [0] * 5 + [1] * 15
        est = [3] * 13 + [0] * 5 + [1] * 12
        report = evaluate(gt, est, POSITIVE, NEGATIVE, rate_hz=50, tolerance_ms=60)
        assert (report.tp, report.fp, report.fn) == (0, 1, 1)
        assert report.sensitivity == 0.0
        wider = evaluate(gt, est, POSITIVE, NEGATIVE, rate_hz=50, tolerance_ms=80)
        assert (wider.tp, wider.fp, wider.fn) == (1, 0, 0)

    def test_spurious_event_is_false_positive(self, pcg_truth, spurious_estimate):
        report = evaluate(pcg_truth, spurious_estimate, POSITIVE, NEGATIVE, rate_hz=50)
        assert (report.tp, report.fp, report.tn, report.fn) == (2, 1, 1, 0)
        assert report.sensitivity == 1.0
        assert report.specificity == 0.5
        assert report.accuracy == pytest.approx(0.9)
        assert_metrics_consistent(report)

    def test_undefined_sensitivity(self):
        report = evaluate([1] * 10, [1] * 10, POSITIVE, NEGATIVE, rate_hz=50)
        assert report.sensitivity == 1.0
        assert not report.sensitivity_defined
        assert report.specificity_defined

    def test_undefined_specificity(self):
        report = evaluate([0] * 10, [0] * 10, POSITIVE, NEGATIVE, rate_hz=50)
        assert report.tp == 1
        assert report.specificity == 1.0
        assert not report.specificity_defined

    def test_full_restriction_equals_none(self, pcg_truth, spurious_estimate):
        full = evaluate(pcg_truth, spurious_estimate, POSITIVE, NEGATIVE, rate_hz=50, restrict=(0, 30))
        assert full == evaluate(pcg_truth, spurious_estimate, POSITIVE, NEGATIVE, rate_hz=50)

    def test_restriction_drops_outside_events(self, pcg_truth, spurious_estimate):
        report = evaluate(pcg_truth, spurious_estimate, POSITIVE, NEGATIVE, rate_hz=50, restrict=(0, 15))
        assert report.accuracy == 1.0
        assert report.fp == 0
        assert report.evaluated_range == (0, 15)

    def test_tolerance_monotone(self):
        rec = make_recording("rec_000", seed=3)
        model = CyclicTransitionModel(4)
        for est in (argmax_decode(rec.P).states, viterbi_decode(rec.P, model).states):
            reports = [evaluate(rec.gt, est, POSITIVE, NEGATIVE, rate_hz=50, tolerance_ms=tol)
                       for tol in (20, 40, 60, 80)]
            for narrow, wide in zip(reports, reports[1:]):
                assert wide.tp >= narrow.tp
                assert wide.tn >= narrow.tn
                assert wide.sensitivity >= narrow.sensitivity
                assert narrow.accuracy == wide.accuracy
            for report in reports:
                assert_metrics_consistent(report)

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatchError):
            evaluate([0, 1], [0], POSITIVE, NEGATIVE, rate_hz=50)

    @pytest.mark.parametrize("restrict", [(5, 5), (0, 31), (-1, 4)])
    def test_empty_range(self, pcg_truth, restrict):
        with pytest.raises(EmptyEvaluationRangeError):
            evaluate(pcg_truth, pcg_truth, POSITIVE, NEGATIVE, rate_hz=50, restrict=restrict)

    def test_rate_must_be_positive(self, pcg_truth):
        with pytest.raises(ValidationError):
            evaluate(pcg_truth, pcg_truth, POSITIVE, NEGATIVE, rate_hz=0)


class TestMetricProperties:
    def test_accuracy_ignores_consistent_relabeling(self, rng):
        for _ in range(50):
            gt = rng.integers(0, 4, size=40)
            est = np.where(rng.random(40) < 0.7, gt, rng.integers(0, 4, size=40))
            relabel = rng.permutation(4)
            before = evaluate(gt, est, POSITIVE, NEGATIVE, rate_hz=50)
            after = evaluate(relabel[gt], relabel[est], POSITIVE, NEGATIVE, rate_hz=50)
            assert after.accuracy == before.accuracy

    def test_matching_pairs_each_event_once(self, rng):
        for seed in range(10):
            rec = make_recording("rec_000", seed=seed)
            est = argmax_decode(rec.P).states
            gt_events, est_events = extract_events(rec.gt), extract_events(est)
            tolerance = float(rng.uniform(0.5, 6.0))
            pairs = match_events(gt_events, est_events, {0, 1, 2, 3}, tolerance_samples=tolerance)
            assert len({g for g, _ in pairs}) == len({e for _, e in pairs}) == len(pairs)
            assert Counter(g.state for g, _ in pairs) == Counter(e.state for _, e in pairs)
