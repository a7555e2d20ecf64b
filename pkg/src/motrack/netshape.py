"""Shape propagation for the appearance-descriptor CNN.

This validates the layer-by-layer output sizes of the descriptor network
without implementing any tensor math.  All spatial layers use same-padding,
so a stride-``s`` layer maps ``(C, H, W)`` to ``(C', ceil(H/s), ceil(W/s))``;
dense layers flatten to a vector and normalization preserves its input shape.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .errors import InvalidSpecError

KINDS = ("conv", "max_pool", "residual", "dense", "normalize")


@dataclass(frozen=True)
class LayerSpec:
    """One layer of the descriptor network, shapes only.

    ``output_channels`` is the channel count for conv/residual layers and the
    output width for dense layers; pooling and normalization preserve their
    input and must leave it unset.
    """

    name: str
    kind: str
    kernel: tuple[int, int] | None = None
    stride: int = 1
    output_channels: int | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidSpecError(
                f"layer {self.name!r}: unknown kind {self.kind!r}"
            )
        if self.stride < 1:
            raise InvalidSpecError(
                f"layer {self.name!r}: stride must be >= 1, got {self.stride}"
            )
        if self.kind in ("conv", "residual", "max_pool"):
            if self.kernel is None:
                raise InvalidSpecError(f"layer {self.name!r}: kernel required")
            k1, k2 = self.kernel
            if k1 < 1 or k2 < 1:
                raise InvalidSpecError(f"layer {self.name!r}: kernel must be positive")
            if self.kind in ("conv", "residual") and (k1 % 2 == 0 or k2 % 2 == 0):
                raise InvalidSpecError(
                    f"layer {self.name!r}: {self.kind} kernel must be odd "
                    "for same-padding"
                )
        if self.kind in ("conv", "residual", "dense"):
            if self.output_channels is None or self.output_channels < 1:
                raise InvalidSpecError(
                    f"layer {self.name!r}: positive output_channels required"
                )
        elif self.output_channels is not None:
            raise InvalidSpecError(
                f"layer {self.name!r}: {self.kind} cannot change channels"
            )


def _apply(layer: LayerSpec, shape: tuple[int, ...]) -> tuple[int, ...]:
    if layer.kind == "normalize":
        return shape
    if layer.kind == "dense":
        return (layer.output_channels,)
    if len(shape) != 3:
        raise InvalidSpecError(
            f"layer {layer.name!r}: {layer.kind} needs a (C, H, W) input, "
            f"got {shape}"
        )
    channels, height, width = shape
    out_channels = (
        channels if layer.kind == "max_pool" else layer.output_channels
    )
    s = layer.stride
    return (out_channels, -(-height // s), -(-width // s))


def propagate_shapes(
    layers: list[LayerSpec], input_shape: tuple[int, ...]
) -> list[tuple[int, ...]]:
    """Output shape after each layer, in order.

    ``input_shape`` is ``(channels, height, width)`` for image input.
    """
    if not layers:
        raise InvalidSpecError("layer list is empty")
    shapes = []
    shape = tuple(input_shape)
    for layer in layers:
        shape = _apply(layer, shape)
        shapes.append(shape)
    return shapes


def load_layers(path) -> list[LayerSpec]:
    """Read layer specs from a JSON list of objects.

    Each object carries ``name`` and ``kind``, plus ``kernel`` (two-element
    list), ``stride`` and ``output_channels`` where applicable.
    """
    raw = json.loads(Path(path).read_text(encoding="ascii"))
    if not isinstance(raw, list):
        raise InvalidSpecError("layer JSON must be a list of objects")
    layers = []
    for i, entry in enumerate(raw):
        if not isinstance(entry, dict):
            raise InvalidSpecError(f"layer {i}: expected an object")
        unknown = set(entry) - {"name", "kind", "kernel", "stride", "output_channels"}
        if unknown:
            raise InvalidSpecError(
                f"layer {i}: unknown key {sorted(unknown)[0]!r}"
            )
        kernel = entry.get("kernel")
        layers.append(
            LayerSpec(
                name=entry.get("name", f"layer_{i}"),
                kind=entry.get("kind", ""),
                kernel=tuple(kernel) if kernel is not None else None,
                stride=entry.get("stride", 1),
                output_channels=entry.get("output_channels"),
            )
        )
    return layers


REFERENCE_INPUT_SHAPE = (3, 128, 64)


def reference_architecture() -> list[LayerSpec]:
    """The descriptor network: 2 convolutions, max-pool, 6 residual blocks,
    a dense projection and the final normalization."""
    k = (3, 3)
    return [
        LayerSpec("conv_1", "conv", k, 1, 32),
        LayerSpec("conv_2", "conv", k, 1, 32),
        LayerSpec("max_pool_3", "max_pool", k, 2),
        LayerSpec("residual_4", "residual", k, 1, 32),
        LayerSpec("residual_5", "residual", k, 1, 32),
        LayerSpec("residual_6", "residual", k, 2, 64),
        LayerSpec("residual_7", "residual", k, 1, 64),
        LayerSpec("residual_8", "residual", k, 2, 128),
        LayerSpec("residual_9", "residual", k, 1, 128),
        LayerSpec("dense_10", "dense", None, 1, 128),
        LayerSpec("normalize_11", "normalize"),
    ]


REFERENCE_OUTPUT_SHAPES = [
    (32, 128, 64),
    (32, 128, 64),
    (32, 64, 32),
    (32, 64, 32),
    (32, 64, 32),
    (64, 32, 16),
    (64, 32, 16),
    (128, 16, 8),
    (128, 16, 8),
    (128,),
    (128,),
]
