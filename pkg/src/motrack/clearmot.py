"""CLEAR-style evaluation of tracking output against ground truth.

Per frame, hypotheses and ground-truth boxes are put in correspondence:
pairs matched in the previous frame persist while their overlap stays above
the threshold, and the remainder is matched by minimum-cost assignment on
``1 - IoU``.  Unmatched hypotheses count as false positives, unmatched
ground-truth boxes as false negatives, and a ground-truth track whose
hypothesis id differs between two consecutive *matched* frames (gaps do not
reset the memory) contributes an identity switch.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .assignment import min_cost_matching
from .association import iou_distance
from .errors import EmptyGroundTruthError
from .model import BoundingBox
from .tracker import FrameOutput


@dataclass(frozen=True)
class MetricsReport:
    """The aggregate metric set; fractions in [0, 1] except mota (≤ 1)."""

    mota: float
    motp: float
    mt: float
    ml: float
    id_switches: int
    fragmentations: int
    false_positives: int
    false_negatives: int

    def to_dict(self) -> dict:
        return {
            "mota": self.mota,
            "motp": self.motp,
            "mt": self.mt,
            "ml": self.ml,
            "id_switches": self.id_switches,
            "fragmentations": self.fragmentations,
            "false_positives": self.false_positives,
            "false_negatives": self.false_negatives,
        }


def match_frame(
    gt: Sequence[tuple[int, BoundingBox]],
    hyp: Sequence[tuple[int, BoundingBox]],
    previous: Mapping[int, int],
    iou_threshold: float = 0.5,
) -> dict[int, int]:
    """One frame's ground-truth → hypothesis correspondence.

    Pairs from ``previous`` that still overlap at least ``iou_threshold``
    are kept before anything else — an established identity is not stolen by
    a hypothesis with better overlap.
    """
    if not gt or not hyp:
        return {}
    gt_ids = [g for g, _ in gt]
    hyp_ids = [h for h, _ in hyp]
    overlap = 1.0 - iou_distance(
        np.array([b.as_array() for _, b in gt]),
        np.array([b.as_array() for _, b in hyp]),
    )

    gt_pos = {g: i for i, g in enumerate(gt_ids)}
    hyp_pos = {h: j for j, h in enumerate(hyp_ids)}
    correspondence: dict[int, int] = {}
    for g, h in sorted(previous.items()):
        i, j = gt_pos.get(g), hyp_pos.get(h)
        if i is not None and j is not None and overlap[i, j] >= iou_threshold:
            correspondence[g] = h

    free_rows = [i for i, g in enumerate(gt_ids) if g not in correspondence]
    taken = set(correspondence.values())
    free_cols = [j for j, h in enumerate(hyp_ids) if h not in taken]
    result = min_cost_matching(1.0 - overlap, free_rows, free_cols)
    for i, j in result.pairs:
        if overlap[i, j] >= iou_threshold:
            correspondence[gt_ids[i]] = hyp_ids[j]
    return correspondence


class EventAccumulator:
    """Frame-by-frame event counts feeding the aggregate metrics."""

    def __init__(self, iou_threshold: float = 0.5):
        self.iou_threshold = iou_threshold
        self.false_positives = 0
        self.false_negatives = 0
        self.id_switches = 0
        self.match_count = 0
        self.overlap_sum = 0.0
        self._correspondence: dict[int, int] = {}
        # per ground-truth track id:
        self._frames_present: dict[int, int] = {}
        self._frames_matched: dict[int, int] = {}
        self._last_hyp: dict[int, int] = {}
        self._in_gap: dict[int, bool] = {}
        self.fragmentations = 0

    def update(
        self,
        gt: Sequence[tuple[int, BoundingBox]],
        hyp: Sequence[tuple[int, BoundingBox]],
    ) -> None:
        correspondence = match_frame(
            gt, hyp, self._correspondence, self.iou_threshold
        )
        self._correspondence = correspondence

        overlap = None
        if gt and hyp:
            overlap = 1.0 - iou_distance(
                np.array([b.as_array() for _, b in gt]),
                np.array([b.as_array() for _, b in hyp]),
            )
        gt_pos = {g: i for i, (g, _) in enumerate(gt)}
        hyp_pos = {h: j for j, (h, _) in enumerate(hyp)}

        self.false_positives += sum(
            1 for h, _ in hyp if h not in correspondence.values()
        )
        for g, _ in gt:
            self._frames_present[g] = self._frames_present.get(g, 0) + 1
            h = correspondence.get(g)
            if h is None:
                self.false_negatives += 1
                if g in self._last_hyp:
                    self._in_gap[g] = True
                continue

            self.match_count += 1
            self._frames_matched[g] = self._frames_matched.get(g, 0) + 1
            self.overlap_sum += float(overlap[gt_pos[g], hyp_pos[h]])
            if g in self._last_hyp and self._last_hyp[g] != h:
                self.id_switches += 1
            self._last_hyp[g] = h
            if self._in_gap.pop(g, False):
                self.fragmentations += 1

    def report(self) -> MetricsReport:
        total_gt = sum(self._frames_present.values())
        if total_gt == 0:
            raise EmptyGroundTruthError("no ground-truth boxes were accumulated")
        tracks = list(self._frames_present)
        ratios = [
            self._frames_matched.get(g, 0) / self._frames_present[g]
            for g in tracks
        ]
        return MetricsReport(
            mota=1.0
            - (self.false_negatives + self.false_positives + self.id_switches)
            / total_gt,
            motp=self.overlap_sum / self.match_count if self.match_count else 0.0,
            mt=sum(1 for r in ratios if r >= 0.8) / len(tracks),
            ml=sum(1 for r in ratios if r <= 0.2) / len(tracks),
            id_switches=self.id_switches,
            fragmentations=self.fragmentations,
            false_positives=self.false_positives,
            false_negatives=self.false_negatives,
        )


def evaluate_sequence(gt, results, iou_threshold: float = 0.5) -> MetricsReport:
    """Run the accumulator over aligned frame maps and report.

    ``gt`` maps frame → ground-truth records (``gt_id``/``bbox`` attributes
    or (id, box) pairs); ``results`` maps frame → (track_id, box) pairs.
    Frames present in only one of the two maps still count — their boxes
    become false negatives or false positives.
    """
    total_gt = sum(len(v) for v in gt.values())
    if total_gt == 0:
        raise EmptyGroundTruthError("ground truth contains no boxes")

    accumulator = EventAccumulator(iou_threshold)
    for frame in sorted(set(gt) | set(results)):
        gt_rows = [_as_pair(r) for r in gt.get(frame, [])]
        hyp_rows = [tuple(r) for r in results.get(frame, [])]
        accumulator.update(gt_rows, hyp_rows)
    return accumulator.report()


def results_from_outputs(outputs: Sequence[FrameOutput]) -> dict:
    """Arrange tracker outputs like a parsed result file, for evaluation."""
    return {
        out.frame_index: [(s.track_id, s.bbox) for s in out.tracks]
        for out in outputs
    }


def _as_pair(record) -> tuple[int, BoundingBox]:
    if isinstance(record, tuple):
        return record
    return (record.gt_id, record.bbox)
