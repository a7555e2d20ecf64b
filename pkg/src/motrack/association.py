"""Association costs between predicted tracks and new detections.

Two complementary distances are combined: a motion term (squared Mahalanobis
distance under each track's Kalman belief) and an appearance term (smallest
cosine distance between a detection's descriptor and the track's recent
descriptor gallery).  A pair is admissible only when both terms sit within
their gates; inadmissible pairs get a large sentinel cost so the assignment
solver never has to know about gating.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import (
    DimensionMismatchError,
    EmptyGalleryError,
    MissingDescriptorError,
    SingularInnovationError,
)
from .kalman import KalmanFilter, innovation_cholesky
from .model import TrackerConfig

# Sentinel placed in cost matrices for pairs that fail a gate.  It strictly
# exceeds any admissible combined cost (at most max(chi-square gate, 2)), so
# the solver can only pick a gated pair when no admissible pairing exists,
# and such pairs are filtered out afterwards.
GATING_COST = 1e5


class Gallery:
    """Ring buffer of the most recent appearance descriptors for one track.

    Descriptors are unit-norm float64 rows; once ``budget`` entries are held,
    appending another evicts the oldest.
    """

    def __init__(self, budget: int = 100, feature_dim: int = 128):
        if budget < 1:
            raise ValueError("gallery budget must be at least 1")
        self.feature_dim = int(feature_dim)
        self._rows = deque(maxlen=int(budget))

    def __len__(self) -> int:
        return len(self._rows)

    @property
    def budget(self) -> int:
        return self._rows.maxlen

    def append(self, descriptor: np.ndarray) -> None:
        descriptor = np.asarray(descriptor, dtype=np.float64)
        if descriptor.shape != (self.feature_dim,):
            raise DimensionMismatchError(
                f"descriptor has shape {descriptor.shape}, "
                f"gallery expects ({self.feature_dim},)"
            )
        self._rows.append(descriptor)

    def as_matrix(self) -> np.ndarray:
        """All stored descriptors as a (k, feature_dim) array, oldest first."""
        if not self._rows:
            return np.empty((0, self.feature_dim))
        return np.stack(tuple(self._rows))


@dataclass(frozen=True)
class CostMatrices:
    """Cost and admissibility for every (track, detection) pair.

    ``cost`` already carries the gating sentinel where ``admissible`` is
    false; solver output must still be filtered by ``admissible`` because a
    maximum-cardinality matching may be forced through sentinel entries.
    """

    cost: np.ndarray
    admissible: np.ndarray

    def __post_init__(self):
        if self.cost.shape != self.admissible.shape:
            raise DimensionMismatchError(
                "cost and admissible matrices must have identical shapes"
            )


def cosine_gallery_distance(gallery: Gallery, descriptor: np.ndarray) -> float:
    """Smallest cosine distance between a descriptor and the gallery.

    Entries and query are unit vectors, so this is ``min(1 - r . r_k)`` over
    the gallery; the value lies in [0, 2].
    """
    if len(gallery) == 0:
        raise EmptyGalleryError("cannot score against an empty gallery")
    descriptor = np.asarray(descriptor, dtype=np.float64)
    if descriptor.shape != (gallery.feature_dim,):
        raise DimensionMismatchError(
            f"descriptor must have shape ({gallery.feature_dim},)"
        )
    return float(np.min(1.0 - gallery.as_matrix() @ descriptor))


def combined_cost(d1: float, d2: float, cfg: TrackerConfig) -> tuple[float, bool]:
    """Blend motion distance ``d1`` and appearance distance ``d2``.

    Returns the weighted cost together with the admissibility indicator:
    both distances must sit within their gates (inclusive).  With
    ``motion_weight`` 0 the cost is purely appearance, yet the motion gate
    still rejects infeasible pairs.
    """
    cost = cfg.motion_weight * d1 + (1.0 - cfg.motion_weight) * d2
    admissible = d1 <= cfg.mahalanobis_threshold and d2 <= cfg.cosine_threshold
    return cost, admissible


def appearance_cost_matrix(galleries, descriptors: np.ndarray) -> np.ndarray:
    """Gallery-minimum cosine distance for every (track, detection) pair.

    All galleries are stacked into one matrix so a single product against the
    detection descriptors covers every pair; per-track minima are then taken
    over each gallery's contiguous block of rows.
    """
    galleries = list(galleries)
    descriptors = np.asarray(descriptors, dtype=np.float64)
    if not galleries:
        return np.zeros((0, descriptors.shape[0]))
    dim = galleries[0].feature_dim
    if descriptors.ndim != 2 or descriptors.shape[1] != dim:
        raise DimensionMismatchError(f"descriptors must be (M, {dim})")
    sizes = [len(g) for g in galleries]
    if min(sizes) == 0:
        raise EmptyGalleryError("cannot score against an empty gallery")

    stacked = np.concatenate([g.as_matrix() for g in galleries])
    distances = 1.0 - stacked @ descriptors.T
    starts = np.concatenate([[0], np.cumsum(sizes)[:-1]]).astype(np.intp)
    return np.minimum.reduceat(distances, starts, axis=0)


def motion_cost_matrix(
    kf: KalmanFilter, states, measurements: np.ndarray
) -> np.ndarray:
    """Squared Mahalanobis distance for every (state, measurement) pair."""
    states = list(states)
    measurements = np.asarray(measurements, dtype=np.float64)
    if not states:
        return np.zeros((0, measurements.shape[0]))
    if measurements.ndim != 2 or measurements.shape[1] != 4:
        raise DimensionMismatchError("measurements must be an (M, 4) array")

    projected = [kf.project(s) for s in states]
    means = np.stack([p.mean for p in projected])
    covariances = np.stack([p.covariance for p in projected])
    chol = innovation_cholesky(covariances)
    return _kernels.mahalanobis_batch(chol, means, measurements)


def build_cost_matrices(
    tracks, detections, cfg: TrackerConfig, kf: KalmanFilter | None = None
) -> CostMatrices:
    """Combined, gated cost matrix for confirmed tracks against detections.

    Every track must hold at least one gallery descriptor and every detection
    must carry one; violations raise with the offending track id or detection
    index rather than silently skewing the appearance term.
    """
    tracks = list(tracks)
    detections = list(detections)
    if kf is None:
        kf = KalmanFilter()
    shape = (len(tracks), len(detections))
    if not tracks or not detections:
        empty = np.zeros(shape)
        return CostMatrices(empty, np.ones(shape, dtype=bool))

    for track in tracks:
        if len(track.gallery) == 0:
            raise EmptyGalleryError(f"track {track.track_id} has an empty gallery")
    for j, det in enumerate(detections):
        if det.descriptor is None:
            raise MissingDescriptorError(f"detection {j} has no descriptor")
    descriptors = np.stack([d.descriptor for d in detections])
    if descriptors.shape[1] != cfg.feature_dim:
        raise DimensionMismatchError(
            f"descriptors have dimension {descriptors.shape[1]}, "
            f"config expects {cfg.feature_dim}"
        )
    measurements = np.stack([d.measurement().as_array() for d in detections])

    try:
        motion = motion_cost_matrix(kf, (t.state for t in tracks), measurements)
    except SingularInnovationError:
        for track in tracks:  # identify the culprit for the error message
            try:
                innovation_cholesky(kf.project(track.state).covariance)
            except SingularInnovationError as exc:
                raise SingularInnovationError(
                    f"track {track.track_id}: {exc}"
                ) from exc
        raise
    appearance = appearance_cost_matrix((t.gallery for t in tracks), descriptors)

    cost = cfg.motion_weight * motion + (1.0 - cfg.motion_weight) * appearance
    admissible = (motion <= cfg.mahalanobis_threshold) & (
        appearance <= cfg.cosine_threshold
    )
    cost[~admissible] = GATING_COST
    return CostMatrices(cost, admissible)


def iou_cost_matrix(tracks, detections, cfg: TrackerConfig) -> CostMatrices:
    """``1 - IoU`` between predicted track boxes and detection boxes."""
    tracks = list(tracks)
    detections = list(detections)
    shape = (len(tracks), len(detections))
    if not tracks or not detections:
        empty = np.zeros(shape)
        return CostMatrices(empty, np.ones(shape, dtype=bool))

    track_boxes = np.stack([t.bbox().as_array() for t in tracks])
    det_boxes = np.stack([d.bbox.as_array() for d in detections])
    cost = 1.0 - _kernels.pairwise_iou(track_boxes, det_boxes)
    admissible = cost <= cfg.iou_max_cost
    cost = np.where(admissible, cost, GATING_COST)
    return CostMatrices(cost, admissible)


def iou_distance(boxes: np.ndarray, candidates: np.ndarray) -> np.ndarray:
    """Raw ``1 - IoU`` matrix between two sets of (x, y, w, h) rows."""
    boxes = np.asarray(boxes, dtype=np.float64).reshape(-1, 4)
    candidates = np.asarray(candidates, dtype=np.float64).reshape(-1, 4)
    return 1.0 - _kernels.pairwise_iou(boxes, candidates)
