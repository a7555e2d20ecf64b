"""Online multi-object tracker with age-prioritised association.

Each frame the tracker predicts every live track forward, associates the new
detections in two stages, then commits the results:

1. a cascade over confirmed tracks, one age level at a time, so recently seen
   tracks get first claim on detections (combined motion/appearance cost with
   both gates applied);
2. an intersection-over-union stage that mops up tentative tracks and
   confirmed tracks that missed exactly one frame.

In IoU-only operation — requested explicitly, or forced because the frame's
detections carry no appearance descriptors — the cascade is skipped and every
live track competes in one IoU stage.  Otherwise descriptor presence must be
all-or-nothing per frame.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

from . import association
from .assignment import min_cost_matching
from .errors import MissingDescriptorError
from .kalman import KalmanFilter, StateDistribution
from .model import BoundingBox, Detection, TrackerConfig


class TrackStatus(enum.Enum):
    TENTATIVE = "tentative"
    CONFIRMED = "confirmed"
    DELETED = "deleted"


class Track:
    """State, bookkeeping counters and descriptor gallery for one target."""

    def __init__(
        self,
        track_id: int,
        state: StateDistribution,
        n_init: int,
        gallery: association.Gallery,
    ):
        self.track_id = track_id
        self.state = state
        self.hits = 1
        self.time_since_update = 0
        self.gallery = gallery
        self.status = (
            TrackStatus.CONFIRMED if self.hits >= n_init else TrackStatus.TENTATIVE
        )

    def predict(self, kf: KalmanFilter) -> None:
        self.state = kf.predict(self.state)
        self.time_since_update += 1

    def update(self, kf: KalmanFilter, detection: Detection, n_init: int) -> None:
        self.state = kf.update(self.state, detection.measurement().as_array())
        self.hits += 1
        self.time_since_update = 0
        if detection.descriptor is not None:
            self.gallery.append(detection.descriptor)
        if self.status is TrackStatus.TENTATIVE and self.hits >= n_init:
            self.status = TrackStatus.CONFIRMED

    def mark_missed(self, max_age: int) -> None:
        if self.status is TrackStatus.TENTATIVE:
            self.status = TrackStatus.DELETED
        elif self.time_since_update > max_age:
            self.status = TrackStatus.DELETED

    def bbox(self) -> BoundingBox:
        """Current box estimate from the state mean.

        The filter state is unconstrained, so briefly degenerate aspect or
        height estimates are clamped rather than allowed to fail conversion.
        """
        u, v, a, h = self.state.mean[:4]
        h = max(float(h), 1e-6)
        w = max(float(a) * h, 1e-6)
        return BoundingBox(float(u) - w / 2.0, float(v) - h / 2.0, w, h)

    def clone(self) -> "Track":
        other = Track.__new__(Track)
        other.track_id = self.track_id
        other.state = self.state
        other.hits = self.hits
        other.time_since_update = self.time_since_update
        other.status = self.status
        gallery = association.Gallery(
            self.gallery.budget, self.gallery.feature_dim
        )
        for row in self.gallery.as_matrix():
            gallery.append(row)
        other.gallery = gallery
        return other

    @property
    def is_confirmed(self) -> bool:
        return self.status is TrackStatus.CONFIRMED

    @property
    def is_tentative(self) -> bool:
        return self.status is TrackStatus.TENTATIVE


@dataclass(frozen=True)
class TrackSnapshot:
    """Identity and box of one confirmed track at the end of a step."""

    track_id: int
    bbox: BoundingBox


@dataclass(frozen=True)
class FrameOutput:
    """Confirmed, just-updated tracks after one tracker step."""

    frame_index: int
    tracks: tuple[TrackSnapshot, ...]


class Tracker:
    """Frame-by-frame multi-object tracker.

    ``step`` consumes the detections of one frame (already thresholded by
    detector confidence — that filter belongs to ingestion) and returns the
    confirmed tracks matched in that frame.  Track ids start at 1 and are
    never reused.  With ``iou_only=True`` appearance descriptors are ignored
    and every frame is associated purely on box overlap.
    """

    def __init__(self, config: TrackerConfig | None = None, iou_only: bool = False):
        self.config = config if config is not None else TrackerConfig()
        self.iou_only = bool(iou_only)
        self.kf = KalmanFilter()
        self.tracks: list[Track] = []
        self._next_id = 1
        self._frame_index = 0

    def step(self, detections: Sequence[Detection]) -> FrameOutput:
        """Advance one frame: predict, associate, commit.

        Any error raised mid-frame rolls the tracker back to its state before
        the call.
        """
        detections = list(detections)
        saved_tracks = [t.clone() for t in self.tracks]
        saved_next_id, saved_frame_index = self._next_id, self._frame_index
        try:
            return self._step(detections)
        except Exception:
            self.tracks = saved_tracks
            self._next_id, self._frame_index = saved_next_id, saved_frame_index
            raise

    def _step(self, detections: list[Detection]) -> FrameOutput:
        cfg = self.config

        use_appearance = not self.iou_only and any(
            d.descriptor is not None for d in detections
        )
        if use_appearance:
            for d in detections:
                if d.descriptor is None:
                    raise MissingDescriptorError(
                        "descriptor presence must be all-or-nothing within a frame"
                    )
                if d.descriptor.shape != (cfg.feature_dim,):
                    raise MissingDescriptorError(
                        f"descriptor has {d.descriptor.shape[0]} entries, "
                        f"configured feature_dim is {cfg.feature_dim}"
                    )

        self._frame_index += 1
        for track in self.tracks:
            track.predict(self.kf)

        if use_appearance:
            matches, unmatched_tracks, unmatched_dets = self._associate(detections)
        else:
            matches, unmatched_tracks, unmatched_dets = self._iou_stage(
                list(range(len(self.tracks))),
                list(range(len(detections))),
                detections,
            )

        for track_idx, det_idx in matches:
            self.tracks[track_idx].update(self.kf, detections[det_idx], cfg.n_init)
        for track_idx in unmatched_tracks:
            self.tracks[track_idx].mark_missed(cfg.max_age)
        for det_idx in unmatched_dets:
            self._initiate(detections[det_idx])
        self.tracks = [t for t in self.tracks if t.status is not TrackStatus.DELETED]

        emitted = tuple(
            TrackSnapshot(t.track_id, t.bbox())
            for t in self.tracks
            if t.is_confirmed and t.time_since_update == 0
        )
        return FrameOutput(self._frame_index, emitted)

    # -- association stages -------------------------------------------------

    def _associate(self, detections):
        """Cascade over confirmed tracks, then IoU on the leftovers."""
        confirmed = [i for i, t in enumerate(self.tracks) if t.is_confirmed]
        tentative = [i for i, t in enumerate(self.tracks) if t.is_tentative]

        matches, unmatched_confirmed, unmatched_dets = self._matching_cascade(
            confirmed, list(range(len(detections))), detections
        )

        iou_candidates = tentative + [
            i for i in unmatched_confirmed
            if self.tracks[i].time_since_update == 1
        ]
        skipped = [
            i for i in unmatched_confirmed
            if self.tracks[i].time_since_update != 1
        ]
        iou_matches, iou_unmatched_tracks, unmatched_dets = self._iou_stage(
            iou_candidates, unmatched_dets, detections
        )
        return (
            matches + iou_matches,
            skipped + iou_unmatched_tracks,
            unmatched_dets,
        )

    def _matching_cascade(self, track_indices, detection_indices, detections):
        """Match one track-age level at a time, youngest first."""
        cfg = self.config
        if not track_indices or not detection_indices:
            return [], list(track_indices), list(detection_indices)

        matches = []
        unmatched_dets = list(detection_indices)
        for age in range(1, cfg.max_age + 1):
            if not unmatched_dets:
                break
            level = [
                i for i in track_indices
                if self.tracks[i].time_since_update == age
                # A confirmed track can lack descriptors when earlier frames
                # ran IoU-only; it cannot pass the appearance gate, so it
                # skips the cascade and falls through to the IoU stage.
                and len(self.tracks[i].gallery) > 0
            ]
            if not level:
                continue

            cm = association.build_cost_matrices(
                [self.tracks[i] for i in level],
                [detections[d] for d in unmatched_dets],
                cfg,
                self.kf,
            )
            result = min_cost_matching(cm.cost)
            hit_cols = set()
            for r, c in result.pairs:
                if cm.admissible[r, c]:
                    matches.append((level[r], unmatched_dets[c]))
                    hit_cols.add(c)
            unmatched_dets = [
                d for c, d in enumerate(unmatched_dets) if c not in hit_cols
            ]

        matched_tracks = {t for t, _ in matches}
        unmatched_tracks = [i for i in track_indices if i not in matched_tracks]
        return matches, unmatched_tracks, unmatched_dets

    def _iou_stage(self, track_indices, detection_indices, detections):
        """Single-stage matching on box overlap."""
        if not track_indices or not detection_indices:
            return [], list(track_indices), list(detection_indices)

        cm = association.iou_cost_matrix(
            [self.tracks[i] for i in track_indices],
            [detections[d] for d in detection_indices],
            self.config,
        )
        result = min_cost_matching(cm.cost)
        matches = []
        hit_rows, hit_cols = set(), set()
        for r, c in result.pairs:
            if cm.admissible[r, c]:
                matches.append((track_indices[r], detection_indices[c]))
                hit_rows.add(r)
                hit_cols.add(c)
        unmatched_tracks = [
            t for r, t in enumerate(track_indices) if r not in hit_rows
        ]
        unmatched_dets = [
            d for c, d in enumerate(detection_indices) if c not in hit_cols
        ]
        return matches, unmatched_tracks, unmatched_dets

    # -- lifecycle ----------------------------------------------------------

    def _initiate(self, detection: Detection) -> None:
        cfg = self.config
        state = self.kf.initiate(detection.measurement().as_array())
        gallery = association.Gallery(cfg.gallery_budget, cfg.feature_dim)
        if detection.descriptor is not None:
            gallery.append(detection.descriptor)
        self.tracks.append(Track(self._next_id, state, cfg.n_init, gallery))
        self._next_id += 1
