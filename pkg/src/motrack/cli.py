"""Command-line interface: track, evaluate, gate-check, render.

Exit codes are stable across subcommands: 0 success, 1 I/O failure,
2 validation failure (bad file content or configuration), 3 diagnostic
failure (a self-check ran fine but its result is out of tolerance).  Every
failure prints exactly one line to standard error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import _kernels
from .errors import ConfigError, MotrackError
from .kalman import CHI2_GATE_95
from .model import TrackerConfig
from .mot_io import read_detections, read_ground_truth, read_results, write_results
from .clearmot import evaluate_sequence
from .render import render_results
from .tracker import FrameOutput, Tracker

EXIT_OK = 0
EXIT_IO = 1
EXIT_VALIDATION = 2
EXIT_DIAGNOSTIC = 3


@dataclass(frozen=True)
class RunManifest:
    """Everything needed to audit one tracking run."""

    sequence: str
    detections_path: str
    features_path: str | None
    config: dict
    output_path: str
    frame_count: int
    wall_clock_ms: float
    frames_per_second: float

    def to_dict(self) -> dict:
        return {
            "sequence": self.sequence,
            "detections_path": self.detections_path,
            "features_path": self.features_path,
            "config": self.config,
            "output_path": self.output_path,
            "frame_count": self.frame_count,
            "wall_clock_ms": self.wall_clock_ms,
            "frames_per_second": self.frames_per_second,
        }


def _load_config(path) -> TrackerConfig:
    if path is None:
        return TrackerConfig()
    text = Path(path).read_text(encoding="ascii")
    try:
        values = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not valid JSON ({exc})") from None
    if not isinstance(values, dict):
        raise ConfigError(f"{path}: config must be a JSON object")
    try:
        return TrackerConfig.from_dict(values)
    except TypeError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def run_track(args) -> int:
    cfg = _load_config(args.config)
    by_frame = read_detections(args.detections, args.features, cfg)

    tracker = Tracker(cfg)
    outputs: list[FrameOutput] = []
    start = time.perf_counter()
    if by_frame:
        first, last = min(by_frame), max(by_frame)
        for frame in range(first, last + 1):
            result = tracker.step(by_frame.get(frame, []))
            outputs.append(FrameOutput(frame, result.tracks))
    elapsed = time.perf_counter() - start

    write_results(outputs, args.output)

    if args.manifest is not None:
        manifest = RunManifest(
            sequence=Path(args.detections).stem,
            detections_path=str(args.detections),
            features_path=None if args.features is None else str(args.features),
            config=cfg.to_dict(),
            output_path=str(args.output),
            frame_count=len(outputs),
            wall_clock_ms=elapsed * 1e3,
            frames_per_second=len(outputs) / elapsed if elapsed > 0 else 0.0,
        )
        with open(args.manifest, "w", encoding="ascii") as handle:
            json.dump(manifest.to_dict(), handle, indent=2)
            handle.write("\n")
    return EXIT_OK


def run_evaluate(args) -> int:
    gt = read_ground_truth(args.gt)
    results = read_results(args.result)
    report = evaluate_sequence(gt, results)
    text = json.dumps(report.to_dict(), indent=2) + "\n"
    if args.report is None:
        sys.stdout.write(text)
    else:
        Path(args.report).write_text(text, encoding="ascii")
    return EXIT_OK


def montecarlo_gate_fraction(samples: int, seed: int) -> float:
    """Fraction of draws from a random 4-d Gaussian that pass the gate.

    The distribution's own squared Mahalanobis distance is chi-square with 4
    degrees of freedom, so the expected fraction under the 95% gate is 0.95
    regardless of the mean and covariance drawn.
    """
    rng = np.random.default_rng(seed)
    basis = rng.standard_normal((4, 4))
    covariance = basis @ basis.T + 0.5 * np.eye(4)
    mean = rng.uniform(-100.0, 100.0, size=4)
    chol = np.linalg.cholesky(covariance)
    draws = mean + rng.standard_normal((samples, 4)) @ chol.T
    distances = _kernels.mahalanobis_batch(
        chol[None, :, :], mean[None, :], draws
    )[0]
    return float(np.mean(distances <= CHI2_GATE_95))


def run_gate_check(args) -> int:
    if args.samples < 1:
        raise ConfigError(f"--samples must be positive, got {args.samples}")
    fraction = montecarlo_gate_fraction(args.samples, args.seed)
    lo, hi = 0.94, 0.96
    print(
        f"samples={args.samples} seed={args.seed} gate={CHI2_GATE_95} "
        f"fraction={fraction:.4f} window=[{lo}, {hi}]"
    )
    if not lo <= fraction <= hi:
        print(
            f"error: in-gate fraction {fraction:.4f} outside [{lo}, {hi}]",
            file=sys.stderr,
        )
        return EXIT_DIAGNOSTIC
    return EXIT_OK


def _parse_frame_size(text: str) -> tuple[int, int]:
    parts = text.lower().split("x")
    if len(parts) != 2:
        raise ConfigError(f"--frame-size must look like 1920x1080, got {text!r}")
    try:
        width, height = int(parts[0]), int(parts[1])
    except ValueError:
        raise ConfigError(
            f"--frame-size must look like 1920x1080, got {text!r}"
        ) from None
    if width < 1 or height < 1:
        raise ConfigError(f"--frame-size must be positive, got {text!r}")
    return width, height


def run_render(args) -> int:
    width, height = _parse_frame_size(args.frame_size)
    results = read_results(args.result)
    render_results(results, width, height, args.out_dir)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="motrack",
        description="Multi-object tracking: track, evaluate, self-check, render.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    track = sub.add_parser("track", help="run the tracker over a detection file")
    track.add_argument("--detections", required=True, help="detection CSV")
    track.add_argument("--features", default=None, help="DSFT descriptor sidecar")
    track.add_argument("--output", required=True, help="result CSV to write")
    track.add_argument("--config", default=None, help="JSON config overrides")
    track.add_argument("--manifest", default=None, help="run manifest JSON to write")
    track.set_defaults(func=run_track)

    evaluate = sub.add_parser("evaluate", help="score a result file against ground truth")
    evaluate.add_argument("--gt", required=True, help="ground-truth CSV")
    evaluate.add_argument("--result", required=True, help="result CSV")
    evaluate.add_argument("--report", default=None, help="write JSON report here instead of stdout")
    evaluate.set_defaults(func=run_evaluate)

    gate = sub.add_parser("gate-check", help="Monte Carlo check of the chi-square gate")
    gate.add_argument("--samples", type=int, default=10000)
    gate.add_argument("--seed", type=int, default=0)
    gate.set_defaults(func=run_gate_check)

    render = sub.add_parser("render", help="draw per-frame SVG overlays of a result file")
    render.add_argument("--result", required=True, help="result CSV")
    render.add_argument("--frame-size", required=True, help="canvas size as WxH")
    render.add_argument("--out-dir", required=True, help="directory for SVG files")
    render.set_defaults(func=run_render)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except MotrackError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
