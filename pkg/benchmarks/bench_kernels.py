#!/usr/bin/env python3
"""Compare the compiled kernels against the pure-Python fallback.

Times each hot kernel in isolation and the whole tracker end to end, once
per available backend, printing per-call medians and the native speedup:

    python3 benchmarks/bench_kernels.py
    python3 benchmarks/bench_kernels.py --frames 500 --targets 50
"""

from __future__ import annotations

import argparse
import statistics
import time

import numpy as np

from motrack import BoundingBox, Detection, Tracker, TrackerConfig
from motrack import _kernels


def median_seconds(fn, repeats: int) -> float:
    fn()  # warm-up, outside the measurement
    samples = []
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - start)
    return statistics.median(samples)


def lap_case(rng: np.random.Generator, size: int):
    cost = rng.uniform(0.0, 100.0, size=(size, size))
    return lambda: _kernels.solve_lap(cost)


def iou_case(rng: np.random.Generator, size: int):
    def boxes(n):
        xy = rng.uniform(0.0, 1000.0, size=(n, 2))
        wh = rng.uniform(10.0, 60.0, size=(n, 2))
        return np.hstack([xy, wh])

    a, b = boxes(size), boxes(size)
    return lambda: _kernels.pairwise_iou(a, b)


def mahalanobis_case(rng: np.random.Generator, tracks: int, points: int):
    basis = rng.normal(size=(tracks, 4, 4))
    cov = basis @ basis.transpose(0, 2, 1) + 4.0 * np.eye(4)
    chol = np.linalg.cholesky(cov)
    means = rng.uniform(-100.0, 100.0, size=(tracks, 4))
    pts = rng.uniform(-100.0, 100.0, size=(points, 4))
    return lambda: _kernels.mahalanobis_batch(chol, means, pts)


def build_sequence(rng: np.random.Generator, frames: int, targets: int, dim: int = 128):
    bases = rng.normal(size=(targets, dim))
    anchors = [(150.0 * (i % 10), 120.0 * (i // 10)) for i in range(targets)]
    sequence = []
    for _ in range(frames):
        dets = []
        for i, (ax, ay) in enumerate(anchors):
            x = ax + rng.normal(0.0, 1.0)
            y = ay + rng.normal(0.0, 1.0)
            descriptor = bases[i] + 0.05 * rng.normal(size=dim)
            dets.append(Detection(BoundingBox(x, y, 30.0, 60.0), 0.9, descriptor))
        sequence.append(dets)
    return sequence


def tracker_fps(sequence) -> float:
    tracker = Tracker(TrackerConfig())
    start = time.perf_counter()
    for dets in sequence:
        tracker.step(dets)
    return len(sequence) / (time.perf_counter() - start)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=20, help="timed calls per kernel")
    parser.add_argument("--lap-size", type=int, default=100, help="assignment matrix side")
    parser.add_argument("--iou-size", type=int, default=200, help="boxes per side")
    parser.add_argument("--tracks", type=int, default=50, help="tracks for the gate kernel")
    parser.add_argument("--points", type=int, default=100, help="measurements for the gate kernel")
    parser.add_argument("--frames", type=int, default=200, help="frames for the end-to-end run")
    parser.add_argument("--targets", type=int, default=25, help="targets per frame end-to-end")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    backends = _kernels.available_backends()
    original = _kernels.backend_name()
    rng = np.random.default_rng(args.seed)

    cases = [
        (f"solve_lap {args.lap_size}x{args.lap_size}", lap_case(rng, args.lap_size)),
        (f"pairwise_iou {args.iou_size}x{args.iou_size}", iou_case(rng, args.iou_size)),
        (
            f"mahalanobis {args.tracks}x{args.points}",
            mahalanobis_case(rng, args.tracks, args.points),
        ),
    ]

    print(f"backends: {', '.join(backends)} (median of {args.repeats} calls)")
    try:
        timings: dict[str, dict[str, float]] = {}
        for label, fn in cases:
            timings[label] = {}
            for backend in backends:
                _kernels.use_backend(backend)
                timings[label][backend] = median_seconds(fn, args.repeats)
        for label, per_backend in timings.items():
            parts = [f"{b} {t * 1e3:8.3f} ms" for b, t in per_backend.items()]
            line = f"  {label:<24} " + "   ".join(parts)
            if "native" in per_backend and "python" in per_backend:
                line += f"   {per_backend['python'] / per_backend['native']:6.1f}x"
            print(line)

        sequence = build_sequence(rng, args.frames, args.targets)
        print(f"end-to-end tracker ({args.frames} frames, {args.targets} targets/frame)")
        fps = {}
        for backend in backends:
            _kernels.use_backend(backend)
            fps[backend] = tracker_fps(sequence)
            print(f"  {backend:<8} {fps[backend]:8.1f} fps")
        if "native" in fps and "python" in fps:
            print(f"  speedup  {fps['native'] / fps['python']:8.1f}x")
    finally:
        _kernels.use_backend(original)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
