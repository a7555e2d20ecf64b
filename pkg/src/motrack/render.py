"""SVG overlays of tracking results, one file per frame.

Each track is drawn as an outlined rectangle plus an id label on a blank
canvas.  Colors are a pure function of the track id — the hue walks the
golden-angle sequence, which keeps any two small ids visually distinct —
so a track keeps its color across frames and across runs.
"""

from __future__ import annotations

from pathlib import Path
from typing import Mapping, Sequence

from .model import BoundingBox

_GOLDEN_RATIO_CONJUGATE = 0.6180339887498949


def track_color(track_id: int) -> str:
    """Deterministic CSS color for a track id."""
    hue = (track_id * _GOLDEN_RATIO_CONJUGATE) % 1.0
    return f"hsl({hue * 360:.1f}, 70%, 45%)"


def render_frame_svg(
    rows: Sequence[tuple[int, BoundingBox]], width: int, height: int
) -> str:
    """SVG document for one frame; valid (empty canvas) when rows is empty."""
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">'
    ]
    for track_id, b in rows:
        color = track_color(track_id)
        parts.append(
            f'  <rect x="{b.x:.2f}" y="{b.y:.2f}" width="{b.w:.2f}" '
            f'height="{b.h:.2f}" fill="none" stroke="{color}" stroke-width="2"/>'
        )
        parts.append(
            f'  <text x="{b.x:.2f}" y="{b.y - 4:.2f}" font-size="14" '
            f'fill="{color}">{track_id}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def render_results(
    results: Mapping[int, Sequence[tuple[int, BoundingBox]]],
    width: int,
    height: int,
    out_dir,
) -> int:
    """Write ``frame_NNNNNN.svg`` for every frame up to the last one seen.

    Frames without tracks get an empty canvas, so the directory always holds
    a contiguous frame range.  Returns the number of files written.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if not results:
        return 0
    last = max(results)
    for frame in range(1, last + 1):
        rows = sorted(results.get(frame, []), key=lambda r: r[0])
        svg = render_frame_svg(rows, width, height)
        (out_dir / f"frame_{frame:06d}.svg").write_text(svg, encoding="ascii")
    return last
