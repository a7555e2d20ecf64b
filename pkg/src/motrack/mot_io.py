"""Bit-exact readers and writers for the tracking file formats.

Three comma-separated text formats share the same 10-column skeleton
(frame, id, x, y, w, h, ...):

* detection files carry a confidence in column 7 (id column unused),
* result files carry a literal ``1`` in column 7 and the track id in column 2,
* ground-truth files carry a validity flag in column 7 and optionally a class
  id and visibility in columns 8-9.

Appearance descriptors travel either in a binary sidecar file aligned to
detection line order, or inline as extra CSV columns after the tenth.

The sidecar container ("DSFT") is: 4 magic bytes ``DSFT``, then version, row
count and dimension as little-endian uint32, then row-major little-endian
float32 values.  Total file size must equal ``16 + 4 * rows * dim`` bytes.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np

from .errors import (
    DimensionMismatchError,
    ParseError,
    RowCountMismatchError,
)
from .model import BoundingBox, Detection, TrackerConfig
from .tracker import FrameOutput

DSFT_MAGIC = b"DSFT"
DSFT_VERSION = 1
_HEADER = struct.Struct("<III")  # version, rows, dim (after the 4 magic bytes)


@dataclass(frozen=True)
class DetectionRecord:
    """One parsed detection line, before confidence filtering."""

    frame: int
    bbox: BoundingBox
    confidence: float
    feature_row_index: int | None = None


@dataclass(frozen=True)
class GroundTruthRecord:
    """One annotated box of one ground-truth track."""

    frame: int
    gt_id: int
    bbox: BoundingBox
    valid_flag: bool


def _split(path: Path, lineno: int, line: str) -> list[str]:
    parts = [p.strip() for p in line.split(",")]
    if len(parts) < 6:
        raise ParseError(path, lineno, f"expected at least 6 columns, got {len(parts)}")
    return parts


def _float(path: Path, lineno: int, text: str, what: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ParseError(path, lineno, f"{what} is not a number: {text!r}") from None


def _int(path: Path, lineno: int, text: str, what: str) -> int:
    value = _float(path, lineno, text, what)
    if value != int(value):
        raise ParseError(path, lineno, f"{what} is not an integer: {text!r}")
    return int(value)


def _bbox(path: Path, lineno: int, parts: list[str]) -> BoundingBox:
    x, y, w, h = (
        _float(path, lineno, parts[2 + k], name)
        for k, name in enumerate(("x", "y", "w", "h"))
    )
    try:
        return BoundingBox(x, y, w, h)
    except ValueError as exc:
        raise ParseError(path, lineno, str(exc)) from None


def _data_lines(path: Path):
    with open(path, "r", encoding="ascii") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.strip()
            if line:
                yield lineno, line


# -- appearance feature container -------------------------------------------


def write_features(path, rows: np.ndarray) -> None:
    """Write descriptor rows to a DSFT container (float32, row-major)."""
    rows = np.ascontiguousarray(rows, dtype="<f4")
    if rows.ndim != 2:
        raise DimensionMismatchError("feature array must be 2-dimensional")
    n, dim = rows.shape
    with open(path, "wb") as handle:
        handle.write(DSFT_MAGIC)
        handle.write(_HEADER.pack(DSFT_VERSION, n, dim))
        handle.write(rows.tobytes())


def read_features(path) -> np.ndarray:
    """Read a DSFT container back into an (n, dim) float32 array.

    The declared row count and dimension must account for the file size
    exactly; anything else is rejected rather than silently truncated.
    """
    path = Path(path)
    data = path.read_bytes()
    if len(data) < 16:
        raise ParseError(path, 0, f"file too short for a DSFT header ({len(data)} bytes)")
    if data[:4] != DSFT_MAGIC:
        raise ParseError(path, 0, f"bad magic {data[:4]!r}, expected {DSFT_MAGIC!r}")
    version, n, dim = _HEADER.unpack_from(data, 4)
    if version != DSFT_VERSION:
        raise ParseError(path, 0, f"unsupported DSFT version {version}")
    expected = 16 + 4 * n * dim
    if len(data) != expected:
        raise ParseError(
            path, 0,
            f"size mismatch: header declares {n}x{dim} "
            f"({expected} bytes), file has {len(data)}",
        )
    return np.frombuffer(data, dtype="<f4", offset=16).reshape(n, dim)


# -- detections ---------------------------------------------------------------


def read_detection_records(path) -> list[DetectionRecord]:
    """Parse every detection line in file order, no filtering applied.

    ``feature_row_index`` is the 0-based position of the line among all
    detection lines — the row its descriptor occupies in a sidecar file.
    """
    path = Path(path)
    records = []
    for lineno, line in _data_lines(path):
        parts = _split(path, lineno, line)
        frame = _int(path, lineno, parts[0], "frame")
        if frame < 1:
            raise ParseError(path, lineno, f"frame must be >= 1, got {frame}")
        if len(parts) < 7:
            raise ParseError(path, lineno, "detection line lacks a confidence column")
        confidence = _float(path, lineno, parts[6], "confidence")
        records.append(
            DetectionRecord(
                frame, _bbox(path, lineno, parts), confidence, len(records)
            )
        )
    return records


def _inline_descriptor(path, lineno, parts, feature_dim):
    extra = len(parts) - 10
    if extra <= 0:
        return None
    if extra != feature_dim:
        raise DimensionMismatchError(
            f"{path}:{lineno}: inline descriptor has {extra} components, "
            f"config expects {feature_dim}"
        )
    return np.array(
        [_float(path, lineno, p, "descriptor component") for p in parts[10:]]
    )


def read_detections(
    det_path, feature_path=None, cfg: TrackerConfig | None = None
) -> dict[int, list[Detection]]:
    """Load detections grouped by frame, features attached, low-confidence dropped.

    Descriptors come from the sidecar ``feature_path`` (row i belongs to
    detection line i) or inline from CSV columns beyond the tenth; supplying
    both is an error.  Rows below ``cfg.min_confidence`` are dropped after
    feature alignment, so sidecar rows stay in sync with line numbers.
    """
    cfg = cfg if cfg is not None else TrackerConfig()
    det_path = Path(det_path)

    features = None
    if feature_path is not None:
        features = read_features(feature_path)
        if features.shape[0] and features.shape[1] != cfg.feature_dim:
            raise DimensionMismatchError(
                f"{feature_path}: feature rows have dimension "
                f"{features.shape[1]}, config expects {cfg.feature_dim}"
            )

    parsed = []  # (frame, bbox, confidence, inline descriptor or None)
    for lineno, line in _data_lines(det_path):
        parts = _split(det_path, lineno, line)
        frame = _int(det_path, lineno, parts[0], "frame")
        if frame < 1:
            raise ParseError(det_path, lineno, f"frame must be >= 1, got {frame}")
        if len(parts) < 7:
            raise ParseError(det_path, lineno, "detection line lacks a confidence column")
        confidence = _float(det_path, lineno, parts[6], "confidence")
        bbox = _bbox(det_path, lineno, parts)
        descriptor = _inline_descriptor(det_path, lineno, parts, cfg.feature_dim)
        if descriptor is not None and features is not None:
            raise ParseError(
                det_path, lineno,
                "line carries inline descriptor columns but a sidecar "
                "feature file was also supplied",
            )
        parsed.append((frame, bbox, confidence, descriptor))

    if features is not None:
        if len(parsed) != features.shape[0]:
            raise RowCountMismatchError(
                f"{feature_path}: {features.shape[0]} feature rows for "
                f"{len(parsed)} detection lines"
            )
        parsed = [
            (frame, bbox, confidence, features[i].astype(np.float64))
            for i, (frame, bbox, confidence, _) in enumerate(parsed)
        ]

    by_frame: dict[int, list[Detection]] = {}
    for frame, bbox, confidence, descriptor in parsed:
        if confidence < cfg.min_confidence:
            continue
        by_frame.setdefault(frame, []).append(
            Detection(bbox, confidence, descriptor)
        )
    return by_frame


# -- results ------------------------------------------------------------------


def write_results(outputs: Iterable[FrameOutput], path) -> None:
    """Write tracker outputs as ``frame,id,x,y,w,h,1,-1,-1,-1`` lines.

    Coordinates carry exactly two decimals; lines are sorted by frame, then
    track id, making the file a deterministic function of the outputs.
    """
    rows = []
    for output in outputs:
        for snap in output.tracks:
            b = snap.bbox
            rows.append((output.frame_index, snap.track_id, b))
    rows.sort(key=lambda r: (r[0], r[1]))
    with open(path, "w", encoding="ascii", newline="\n") as handle:
        for frame, track_id, b in rows:
            handle.write(
                f"{frame},{track_id},{b.x:.2f},{b.y:.2f},"
                f"{b.w:.2f},{b.h:.2f},1,-1,-1,-1\n"
            )


def read_results(path) -> dict[int, list[tuple[int, BoundingBox]]]:
    """Read a result file back as frame → list of (track_id, box)."""
    path = Path(path)
    by_frame: dict[int, list[tuple[int, BoundingBox]]] = {}
    for lineno, line in _data_lines(path):
        parts = _split(path, lineno, line)
        frame = _int(path, lineno, parts[0], "frame")
        track_id = _int(path, lineno, parts[1], "track id")
        by_frame.setdefault(frame, []).append(
            (track_id, _bbox(path, lineno, parts))
        )
    return by_frame


# -- ground truth -------------------------------------------------------------


def read_ground_truth(path) -> dict[int, list[GroundTruthRecord]]:
    """Read ground truth, keeping only evaluation-eligible rows.

    Column 7, when present, is the validity flag: rows with flag 0 are
    excluded.  Column 8, when present, is a class id: only class 1 (and the
    placeholder -1) survive.  ``(frame, gt_id)`` pairs must be unique.
    """
    path = Path(path)
    by_frame: dict[int, list[GroundTruthRecord]] = {}
    seen: set[tuple[int, int]] = set()
    for lineno, line in _data_lines(path):
        parts = _split(path, lineno, line)
        frame = _int(path, lineno, parts[0], "frame")
        gt_id = _int(path, lineno, parts[1], "ground-truth id")
        if gt_id < 1:
            raise ParseError(path, lineno, f"ground-truth id must be >= 1, got {gt_id}")
        bbox = _bbox(path, lineno, parts)

        key = (frame, gt_id)
        if key in seen:
            raise ParseError(path, lineno, f"duplicate (frame, id) pair {key}")
        seen.add(key)

        valid = True
        if len(parts) >= 7:
            valid = _int(path, lineno, parts[6], "validity flag") != 0
        if len(parts) >= 8:
            class_id = _int(path, lineno, parts[7], "class id")
            valid = valid and class_id in (1, -1)
        if not valid:
            continue
        by_frame.setdefault(frame, []).append(
            GroundTruthRecord(frame, gt_id, bbox, True)
        )
    return by_frame
