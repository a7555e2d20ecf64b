"""Evaluation protocol: frame correspondence, event counting, aggregates."""

import pytest

from motrack import (
    BoundingBox,
    EmptyGroundTruthError,
    EventAccumulator,
    evaluate_sequence,
    match_frame,
)
from motrack.clearmot import results_from_outputs
from motrack.mot_io import GroundTruthRecord
from motrack.tracker import FrameOutput, TrackSnapshot

BOX = BoundingBox(0.0, 0.0, 10.0, 10.0)
FAR = BoundingBox(100.0, 100.0, 10.0, 10.0)


def shifted(dx, base=BOX):
    return BoundingBox(base.x + dx, base.y, base.w, base.h)


class TestMatchFrame:
    def test_greedy_persistence_beats_better_overlap(self):
        # gt 1 was matched to hyp 1; hyp 2 now overlaps better, but the
        # established pair persists as long as it clears the threshold
        gt = [(1, BOX)]
        hyp = [(1, shifted(3.0)), (2, BOX)]  # old pair IoU 70/130 >= 0.5
        assert match_frame(gt, hyp, {1: 1}) == {1: 1}

    def test_persistence_dropped_below_threshold(self):
        gt = [(1, BOX)]
        hyp = [(1, shifted(8.0)), (2, BOX)]  # old pair IoU 2/18 < 0.5
        assert match_frame(gt, hyp, {1: 1}) == {1: 2}

    def test_fresh_matching_is_min_cost(self):
        gt = [(1, BOX), (2, shifted(20.0))]
        hyp = [(8, shifted(21.0)), (9, shifted(1.0))]
        assert match_frame(gt, hyp, {}) == {1: 9, 2: 8}

    def test_below_threshold_pairs_not_created(self):
        assert match_frame([(1, BOX)], [(1, FAR)], {}) == {}

    def test_empty_sides(self):
        assert match_frame([], [(1, BOX)], {}) == {}
        assert match_frame([(1, BOX)], [], {1: 1}) == {}


class TestEventCounting:
    def test_perfect_tracking(self):
        acc = EventAccumulator()
        for _ in range(5):
            acc.update([(1, BOX)], [(7, BOX)])
        report = acc.report()
        assert report.mota == 1.0
        assert report.motp == 1.0
        assert report.id_switches == 0
        assert (report.false_positives, report.false_negatives) == (0, 0)
        assert (report.mt, report.ml) == (1.0, 0.0)

    def test_false_positive_and_negative(self):
        acc = EventAccumulator()
        acc.update([(1, BOX)], [(7, BOX), (8, FAR)])  # one FP
        acc.update([(1, BOX)], [])  # one FN
        report = acc.report()
        assert report.false_positives == 1
        assert report.false_negatives == 1
        assert report.mota == pytest.approx(1.0 - 2 / 2)

    def test_id_switch_between_consecutive_matched_frames(self):
        acc = EventAccumulator()
        acc.update([(1, BOX)], [(7, BOX)])
        acc.update([(1, BOX)], [(8, BOX)])
        report = acc.report()
        assert report.id_switches == 1
        assert report.fragmentations == 0

    def test_switch_memory_survives_gaps(self):
        # matched by 7, absent from the hypotheses for a frame, then matched
        # by 8: the identity change still counts even across the gap
        acc = EventAccumulator()
        acc.update([(1, BOX)], [(7, BOX)])
        acc.update([(1, BOX)], [])
        acc.update([(1, BOX)], [(8, BOX)])
        report = acc.report()
        assert report.id_switches == 1
        assert report.fragmentations == 1

    def test_fragmentation_without_switch(self):
        acc = EventAccumulator()
        acc.update([(1, BOX)], [(7, BOX)])
        acc.update([(1, BOX)], [])
        acc.update([(1, BOX)], [(7, BOX)])
        report = acc.report()
        assert report.fragmentations == 1
        assert report.id_switches == 0

    def test_gt_absence_is_not_a_fragmentation(self):
        # the gt track leaves the scene entirely; no interruption is charged
        acc = EventAccumulator()
        acc.update([(1, BOX)], [(7, BOX)])
        acc.update([], [])
        acc.update([(1, BOX)], [(7, BOX)])
        report = acc.report()
        assert report.fragmentations == 0

    def test_motp_is_mean_matched_overlap(self):
        acc = EventAccumulator()
        acc.update([(1, BOX)], [(7, BOX)])  # overlap 1.0
        acc.update([(1, BOX)], [(7, shifted(3.0))])  # overlap 7/13, still matched
        report = acc.report()
        assert report.motp == pytest.approx((1.0 + 7.0 / 13.0) / 2.0)

    def test_motp_zero_when_nothing_matches(self):
        acc = EventAccumulator()
        acc.update([(1, BOX)], [])
        assert acc.report().motp == 0.0

    def test_mota_can_go_negative(self):
        acc = EventAccumulator()
        acc.update([(1, BOX)], [(7, BOX), (8, FAR), (9, shifted(50.0))])
        assert acc.report().mota < 0.0

    def test_mostly_tracked_and_lost_thresholds(self):
        acc = EventAccumulator()
        for i in range(10):
            frame_gt = [(1, BOX), (2, shifted(30.0)), (3, shifted(60.0))]
            hyp = [(1, BOX)]  # gt 1 matched every frame
            if i < 8:  # gt 2 matched 8/10 frames: exactly mostly tracked
                hyp.append((2, shifted(30.0)))
            if i < 2:  # gt 3 matched 2/10 frames: exactly mostly lost
                hyp.append((3, shifted(60.0)))
            acc.update(frame_gt, hyp)
        report = acc.report()
        assert report.mt == pytest.approx(2 / 3)
        assert report.ml == pytest.approx(1 / 3)

    def test_empty_report_raises(self):
        with pytest.raises(EmptyGroundTruthError):
            EventAccumulator().report()


class TestEvaluateSequence:
    def test_accepts_records_and_pairs(self):
        gt = {1: [GroundTruthRecord(1, 1, BOX, True)], 2: [(1, BOX)]}
        results = {1: [(7, BOX)], 2: [(7, BOX)]}
        report = evaluate_sequence(gt, results)
        assert report.mota == 1.0

    def test_disjoint_frames_counted(self):
        gt = {1: [(1, BOX)]}
        results = {2: [(7, BOX)]}
        report = evaluate_sequence(gt, results)
        assert report.false_negatives == 1
        assert report.false_positives == 1

    def test_empty_ground_truth(self):
        with pytest.raises(EmptyGroundTruthError):
            evaluate_sequence({}, {1: [(7, BOX)]})

    def test_hypothesis_relabeling_invariance(self):
        gt = {f: [(1, shifted(float(f)))] for f in range(1, 8)}
        results = {f: [(3, shifted(float(f)))] for f in range(1, 8)}
        renamed = {f: [(4444, b) for _, b in rows] for f, rows in results.items()}
        a = evaluate_sequence(gt, results)
        b = evaluate_sequence(gt, renamed)
        assert a == b

    def test_results_from_outputs(self):
        outputs = [
            FrameOutput(1, (TrackSnapshot(1, BOX),)),
            FrameOutput(2, ()),
        ]
        assert results_from_outputs(outputs) == {1: [(1, BOX)], 2: []}

    def test_to_dict_keys(self):
        gt = {1: [(1, BOX)]}
        report = evaluate_sequence(gt, {1: [(7, BOX)]})
        assert list(report.to_dict()) == [
            "mota",
            "motp",
            "mt",
            "ml",
            "id_switches",
            "fragmentations",
            "false_positives",
            "false_negatives",
        ]
