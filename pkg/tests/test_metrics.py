import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from segal.metrics import ClassIouReport, ConfusionCounts, accumulate, iou_report, predict_mask
from segal.types import Mask, ProbMap


def mask_of(values, sample_id="m"):
    return Mask(sample_id, np.asarray(values, dtype=np.int32))


class TestAccumulate:
    def test_perfect_prediction(self):
        truth = mask_of([[0, 0], [0, 0]])
        conf = accumulate(ConfusionCounts.zeros(2), truth, truth)
        assert conf.tp.tolist() == [4, 0]
        assert conf.fp.tolist() == [0, 0]
        assert conf.fn.tolist() == [0, 0]

    def test_hand_counted_2x3(self):
        # per-pixel hand count: truth (0,0,0,1,1,2), pred (0,1,0,1,2,2)
        truth = mask_of([[0, 0, 0], [1, 1, 2]])
        pred = mask_of([[0, 1, 0], [1, 2, 2]])
        conf = accumulate(ConfusionCounts.zeros(3), pred, truth)
        assert conf.tp.tolist() == [2, 1, 1]
        assert conf.fp.tolist() == [0, 1, 1]
        assert conf.fn.tolist() == [1, 1, 0]

    def test_disjoint_prediction(self):
        truth = mask_of([[0, 0], [0, 0]])
        pred = mask_of([[1, 1], [1, 1]])
        conf = accumulate(ConfusionCounts.zeros(2), pred, truth)
        assert conf.tp[0] == 0 and conf.fn[0] == 4 and conf.fp[1] == 4

    def test_shape_mismatch(self):
        with pytest.raises(ValueError, match="shape mismatch"):
            accumulate(ConfusionCounts.zeros(2), mask_of([[0]]), mask_of([[0, 0]]))

    @settings(max_examples=50, deadline=None)
    @given(st.integers(min_value=0, max_value=2**31 - 1))
    def test_every_pixel_counted_once(self, seed):
        rng = np.random.default_rng(seed)
        k = int(rng.integers(2, 6))
        truth = mask_of(rng.integers(0, k, size=(5, 7)))
        pred = mask_of(rng.integers(0, k, size=(5, 7)))
        conf = accumulate(ConfusionCounts.zeros(k), pred, truth)
        total = 35
        assert int(conf.tp.sum() + conf.fn.sum()) == total
        assert int(conf.tp.sum() + conf.fp.sum()) == total

    def test_order_invariance(self, rng):
        k = 4
        pairs = []
        for _ in range(5):
            pairs.append(
                (mask_of(rng.integers(0, k, size=(3, 3))), mask_of(rng.integers(0, k, size=(3, 3))))
            )
        forward = ConfusionCounts.zeros(k)
        for pred, truth in pairs:
            forward = accumulate(forward, pred, truth)
        backward = ConfusionCounts.zeros(k)
        for pred, truth in reversed(pairs):
            backward = accumulate(backward, pred, truth)
        assert forward == backward
        assert iou_report(forward, 0) == iou_report(backward, 0)


class TestIouReport:
    def test_basic_ratio(self):
        conf = ConfusionCounts(1, np.array([3]), np.array([1]), np.array([2]))
        report = iou_report(conf, cycle=4)
        assert report.iou[0] == pytest.approx(0.5)
        assert report.gap[0] == pytest.approx(0.5)
        assert report.cycle == 4

    def test_undefined_class_excluded(self):
        conf = ConfusionCounts(2, np.array([3, 0]), np.array([1, 0]), np.array([2, 0]))
        report = iou_report(conf, 0)
        assert report.iou[1] is None and report.gap[1] is None
        assert report.miou == pytest.approx(0.5)
        assert report.defined_classes == (0,)

    def test_gap_is_exact_complement(self):
        conf = ConfusionCounts(1, np.array([248]), np.array([380]), np.array([372]))
        report = iou_report(conf, 0)
        assert report.iou[0] == pytest.approx(0.248, abs=1e-3)
        assert report.gap[0] == 1.0 - report.iou[0]

    def test_perfect_prediction_means_miou_one(self, rng):
        truth = mask_of(rng.integers(0, 3, size=(6, 6)))
        conf = accumulate(ConfusionCounts.zeros(3), truth, truth)
        report = iou_report(conf, 0)
        assert report.miou == pytest.approx(1.0)
        assert all(g == 0.0 for g in report.gap if g is not None)

    def test_all_undefined(self):
        report = iou_report(ConfusionCounts.zeros(3), 0)
        assert report.miou is None
        assert report.defined_classes == ()

    def test_dict_round_trip(self):
        conf = ConfusionCounts(2, np.array([3, 0]), np.array([1, 0]), np.array([2, 0]))
        report = iou_report(conf, 5)
        assert ClassIouReport.from_dict(report.to_dict()) == report


class TestPredictMask:
    def test_argmax_with_tie_to_lowest_index(self):
        probs = np.zeros((1, 2, 3))
        probs[0, 0] = [0.4, 0.4, 0.2]  # tie between 0 and 1 -> 0
        probs[0, 1] = [0.1, 0.2, 0.7]
        pred = predict_mask(ProbMap("p", probs))
        assert pred.labels.tolist() == [[0, 2]]
