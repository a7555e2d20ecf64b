"""Online multi-object tracking with motion and appearance association.

The package is organised around a frame-by-frame :class:`Tracker` that
combines Kalman-filtered motion prediction with a cosine distance over
per-track appearance galleries, an exact min-cost assignment solver, MOT-style
file I/O, and CLEAR-style evaluation.  Numerical hot spots run through a
compiled extension when available and an equivalent pure-Python fallback
otherwise (see :mod:`motrack._kernels`).
"""

from .assignment import AssignmentResult, min_cost_matching
from .association import (
    GATING_COST,
    CostMatrices,
    Gallery,
    appearance_cost_matrix,
    build_cost_matrices,
    combined_cost,
    cosine_gallery_distance,
    iou_cost_matrix,
    motion_cost_matrix,
)
from .clearmot import (
    EventAccumulator,
    MetricsReport,
    evaluate_sequence,
    match_frame,
    results_from_outputs,
)
from .errors import (
    ConfigError,
    DimensionMismatchError,
    EmptyGalleryError,
    EmptyGroundTruthError,
    InvalidSpecError,
    MissingDescriptorError,
    MotrackError,
    ParseError,
    RowCountMismatchError,
    SingularInnovationError,
    ZeroVectorError,
)
from .kalman import (
    CHI2_GATE_95,
    KalmanFilter,
    ProjectedDistribution,
    StateDistribution,
    innovation_cholesky,
)
from .model import (
    BoundingBox,
    Detection,
    MeasurementXYAH,
    TrackerConfig,
    bbox_to_xyah,
    iou,
    normalize_descriptor,
    xyah_to_bbox,
)
from .mot_io import (
    read_detection_records,
    read_detections,
    read_features,
    read_ground_truth,
    read_results,
    write_features,
    write_results,
)
from .netshape import LayerSpec, load_layers, propagate_shapes, reference_architecture
from .tracker import FrameOutput, Track, TrackSnapshot, TrackStatus, Tracker

__version__ = "0.1.0"

__all__ = [
    "AssignmentResult",
    "BoundingBox",
    "CHI2_GATE_95",
    "ConfigError",
    "CostMatrices",
    "Detection",
    "DimensionMismatchError",
    "EmptyGalleryError",
    "EmptyGroundTruthError",
    "EventAccumulator",
    "FrameOutput",
    "GATING_COST",
    "Gallery",
    "InvalidSpecError",
    "KalmanFilter",
    "LayerSpec",
    "MeasurementXYAH",
    "MetricsReport",
    "MissingDescriptorError",
    "MotrackError",
    "ParseError",
    "ProjectedDistribution",
    "RowCountMismatchError",
    "SingularInnovationError",
    "StateDistribution",
    "Track",
    "TrackSnapshot",
    "TrackStatus",
    "Tracker",
    "TrackerConfig",
    "ZeroVectorError",
    "appearance_cost_matrix",
    "bbox_to_xyah",
    "build_cost_matrices",
    "combined_cost",
    "cosine_gallery_distance",
    "evaluate_sequence",
    "innovation_cholesky",
    "iou",
    "iou_cost_matrix",
    "load_layers",
    "match_frame",
    "min_cost_matching",
    "motion_cost_matrix",
    "normalize_descriptor",
    "propagate_shapes",
    "read_detection_records",
    "read_detections",
    "read_features",
    "read_ground_truth",
    "read_results",
    "reference_architecture",
    "results_from_outputs",
    "write_features",
    "write_results",
    "xyah_to_bbox",
]
