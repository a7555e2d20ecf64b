"""Core value types: boxes, measurements, detections and tracker configuration.

Boxes are stored in top-left/width/height form, matching the text file
convention, while the filter operates on center/aspect/height measurements.
The two conversions are explicit so the boundary stays visible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np

from .errors import ConfigError, DimensionMismatchError, ZeroVectorError


@dataclass(frozen=True)
class BoundingBox:
    """Axis-aligned box in pixel coordinates, (x, y) is the top-left corner."""

    x: float
    y: float
    w: float
    h: float

    def __post_init__(self):
        if not (self.w > 0 and self.h > 0):
            raise ValueError(f"box sides must be positive, got w={self.w}, h={self.h}")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.w, self.h], dtype=np.float64)


@dataclass(frozen=True)
class MeasurementXYAH:
    """Observation vector: box center (u, v), aspect ratio w/h, height."""

    u: float
    v: float
    a: float
    h: float

    def __post_init__(self):
        if not (self.a > 0 and self.h > 0):
            raise ValueError(f"aspect and height must be positive, got a={self.a}, h={self.h}")

    def as_array(self) -> np.ndarray:
        return np.array([self.u, self.v, self.a, self.h], dtype=np.float64)


def bbox_to_xyah(b: BoundingBox) -> MeasurementXYAH:
    """Convert a top-left box to the center/aspect/height measurement."""
    return MeasurementXYAH(b.x + b.w / 2.0, b.y + b.h / 2.0, b.w / b.h, b.h)


def xyah_to_bbox(m: MeasurementXYAH) -> BoundingBox:
    """Inverse of :func:`bbox_to_xyah`."""
    w = m.a * m.h
    return BoundingBox(m.u - w / 2.0, m.v - m.h / 2.0, w, m.h)


def iou(a: BoundingBox, b: BoundingBox) -> float:
    """Intersection over union of two boxes, in [0, 1]."""
    ix = max(a.x, b.x)
    iy = max(a.y, b.y)
    iw = max(0.0, min(a.x + a.w, b.x + b.w) - ix)
    ih = max(0.0, min(a.y + a.h, b.y + b.h) - iy)
    inter = iw * ih
    union = a.w * a.h + b.w * b.h - inter
    # rounding in the union can push the ratio a hair past 1 for
    # near-identical sliver boxes; the true value never exceeds 1
    return min(1.0, inter / union) if union > 0 else 0.0


def normalize_descriptor(v, feature_dim: int | None = None) -> np.ndarray:
    """Return ``v / ||v||`` as a float64 unit vector.

    Raises ``DimensionMismatchError`` when ``feature_dim`` is given and does
    not match, and ``ZeroVectorError`` for numerically zero input.
    """
    arr = np.asarray(v, dtype=np.float64).reshape(-1)
    if feature_dim is not None and arr.shape[0] != feature_dim:
        raise DimensionMismatchError(
            f"descriptor has {arr.shape[0]} components, expected {feature_dim}"
        )
    norm = math.sqrt(float(arr @ arr))
    if norm < 1e-12:
        raise ZeroVectorError("descriptor norm below 1e-12")
    return arr / norm


@dataclass(frozen=True)
class Detection:
    """One detector output: box, confidence and optional appearance descriptor.

    The descriptor is re-normalized on construction so file round-off cannot
    leak non-unit vectors into the cosine metric.
    """

    bbox: BoundingBox
    confidence: float
    descriptor: np.ndarray | None = None

    def __post_init__(self):
        if self.descriptor is not None:
            object.__setattr__(self, "descriptor", normalize_descriptor(self.descriptor))

    def measurement(self) -> MeasurementXYAH:
        return bbox_to_xyah(self.bbox)


@dataclass(frozen=True)
class TrackerConfig:
    """All tunable constants of the tracker.

    ``motion_weight`` is the weight of the motion term in the combined
    association cost (the appearance term gets ``1 - motion_weight``); with
    the default 0 only appearance enters the cost while the motion gate still
    rejects infeasible pairs.  ``mahalanobis_threshold`` defaults to the 95%
    quantile of a chi-square distribution with 4 degrees of freedom.
    """

    motion_weight: float = 0.0
    mahalanobis_threshold: float = 9.4877
    cosine_threshold: float = 0.2
    max_age: int = 30
    n_init: int = 3
    gallery_budget: int = 100
    min_confidence: float = 0.3
    iou_max_cost: float = 0.7
    feature_dim: int = 128

    def __post_init__(self):
        if not 0.0 <= self.motion_weight <= 1.0:
            raise ConfigError(f"motion_weight must be in [0, 1], got {self.motion_weight}")
        if self.mahalanobis_threshold <= 0 or self.cosine_threshold <= 0:
            raise ConfigError("gate thresholds must be positive")
        if self.max_age < 1 or self.n_init < 1 or self.gallery_budget < 1:
            raise ConfigError("max_age, n_init and gallery_budget must be >= 1")
        if not 0.0 <= self.iou_max_cost <= 1.0:
            raise ConfigError(f"iou_max_cost must be in [0, 1], got {self.iou_max_cost}")
        if self.feature_dim < 1:
            raise ConfigError("feature_dim must be >= 1")

    @classmethod
    def from_dict(cls, values: dict) -> "TrackerConfig":
        """Build a config from a flat mapping, rejecting unknown keys.

        ``lambda`` is accepted as an alias for ``motion_weight`` (the field
        cannot carry that name in Python).
        """
        values = dict(values)
        if "lambda" in values:
            if "motion_weight" in values:
                raise ConfigError(
                    "config sets both 'lambda' and its alias 'motion_weight'"
                )
            values["motion_weight"] = values.pop("lambda")
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(values) - known)
        if unknown:
            raise ConfigError(f"unknown config key: {unknown[0]}")
        return cls(**values)

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}
