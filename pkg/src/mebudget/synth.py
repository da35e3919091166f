"""Deterministic synthetic luma sequences with planted integer motion.

Layers are rectangular patches pasted over a flat background. A layer's
pixel content is generated once and translated by an integer step each
frame, so block matching between consecutive frames recovers the
negated step exactly (reference = previous frame). Two noise-like
options break that: a layer's `flicker` amplitude adds fresh noise to
its patch every frame (an irreducible residual no displacement can
remove), and `noise_amplitude` adds fresh full-frame noise (raises
every SAD floor).

All randomness comes from one seeded generator with a fixed draw order
(static patches in layer order, then per frame: jitter, flicker
noise, global noise), so a spec is bit-reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .video_io import MB_SIZE, SEARCH_RANGE, LumaFrame

TEXTURES = ("flat", "noise", "checker")


@dataclass(frozen=True)
class LayerSpec:
    """One moving rectangle.

    region: (x, y, w, h) of the patch at frame 0, may leave the frame
    (pasting clips). motion: per-frame step (dx, dy). jitter: extra
    uniform integer step in [-jitter, jitter] per axis per frame.
    amplitude: texture contrast around `value` for noise/checker.
    cell: checker cell size in pixels. flicker: amplitude of fresh
    per-frame noise added to the patch (irreducible residual).
    """

    texture: str
    region: tuple[int, int, int, int]
    motion: tuple[int, int] = (0, 0)
    jitter: int = 0
    value: int = 128
    amplitude: int = 16
    cell: int = 4
    flicker: int = 0

    def __post_init__(self):
        if self.texture not in TEXTURES:
            raise ValueError(f"unknown texture {self.texture!r}")
        x, y, w, h = self.region
        if w <= 0 or h <= 0:
            raise ValueError("layer region must have positive size")
        for step in self.motion:
            if abs(step) > SEARCH_RANGE:
                raise ValueError(f"per-frame motion {self.motion} exceeds "
                                 f"+-{SEARCH_RANGE}")
        if self.jitter < 0 or self.amplitude < 0 or self.cell <= 0 \
                or self.flicker < 0:
            raise ValueError("jitter/amplitude/flicker must be >= 0, "
                             "cell > 0")
        if not 0 <= self.value <= 255:
            raise ValueError("value must be a sample level in [0, 255]")


@dataclass(frozen=True)
class SynthSpec:
    width: int
    height: int
    frames: int
    layers: tuple[LayerSpec, ...] = ()
    background: int = 128
    noise_amplitude: int = 0
    seed: int = 0

    def __post_init__(self):
        if self.width % MB_SIZE or self.height % MB_SIZE \
                or self.width <= 0 or self.height <= 0:
            raise ValueError(f"frame size must be positive multiples of "
                             f"{MB_SIZE}, got {self.width}x{self.height}")
        if self.frames < 1:
            raise ValueError("need at least one frame")
        if self.noise_amplitude < 0:
            raise ValueError("noise_amplitude must be >= 0")
        if not 0 <= self.background <= 255:
            raise ValueError("background must be a sample level in [0, 255]")
        object.__setattr__(self, "layers", tuple(self.layers))


@dataclass
class LayerTrack:
    """Ground truth for one layer: where it sat and how it moved."""

    layer: int
    positions: list[tuple[int, int]] = field(default_factory=list)
    steps: list[tuple[int, int]] = field(default_factory=list)
    clipped: list[bool] = field(default_factory=list)


@dataclass
class SynthResult:
    spec: SynthSpec
    frames: list[LumaFrame]
    tracks: list[LayerTrack]


def _static_patch(layer: LayerSpec, rng) -> np.ndarray:
    x, y, w, h = layer.region
    lo = max(layer.value - layer.amplitude, 0)
    hi = min(layer.value + layer.amplitude, 255)
    if layer.texture == "flat":
        return np.full((h, w), layer.value, dtype=np.uint8)
    if layer.texture == "noise":
        return rng.integers(lo, hi + 1, size=(h, w)).astype(np.uint8)
    rows = (np.arange(h) // layer.cell)[:, None]
    cols = (np.arange(w) // layer.cell)[None, :]
    return np.where((rows + cols) % 2 == 0, hi, lo).astype(np.uint8)


def _flickered(patch: np.ndarray, layer: LayerSpec, rng) -> np.ndarray:
    noise = rng.integers(-layer.flicker, layer.flicker + 1,
                         size=patch.shape)
    return np.clip(patch.astype(np.int16) + noise, 0, 255).astype(np.uint8)


def _paste(plane, patch, x, y) -> bool:
    """Paste patch with top-left at (x, y), clipping to the plane.

    Returns True when any part was clipped away.
    """
    h, w = patch.shape
    fh, fw = plane.shape
    x0, y0 = max(x, 0), max(y, 0)
    x1, y1 = min(x + w, fw), min(y + h, fh)
    if x0 >= x1 or y0 >= y1:
        return True
    plane[y0:y1, x0:x1] = patch[y0 - y:y1 - y, x0 - x:x1 - x]
    return (x0 - x, y0 - y) != (0, 0) or (x1 - x, y1 - y) != (w, h)


def synthesize(spec: SynthSpec) -> SynthResult:
    """Render the sequence and the per-layer ground-truth tracks."""
    rng = np.random.default_rng(spec.seed)
    patches = [_static_patch(layer, rng) for layer in spec.layers]
    positions = [list(layer.region[:2]) for layer in spec.layers]
    tracks = [LayerTrack(layer=i) for i in range(len(spec.layers))]
    frames = []
    for t in range(spec.frames):
        if t > 0:
            for i, layer in enumerate(spec.layers):
                dx, dy = layer.motion
                if layer.jitter:
                    jx, jy = rng.integers(-layer.jitter, layer.jitter + 1,
                                          size=2)
                    dx, dy = dx + int(jx), dy + int(jy)
                dx = max(-SEARCH_RANGE, min(SEARCH_RANGE, dx))
                dy = max(-SEARCH_RANGE, min(SEARCH_RANGE, dy))
                positions[i][0] += dx
                positions[i][1] += dy
                tracks[i].steps.append((dx, dy))
        plane = np.full((spec.height, spec.width), spec.background,
                        dtype=np.uint8)
        for i, layer in enumerate(spec.layers):
            patch = patches[i]
            if layer.flicker:
                patch = _flickered(patch, layer, rng)
            clipped = _paste(plane, patch, positions[i][0], positions[i][1])
            tracks[i].positions.append(tuple(positions[i]))
            tracks[i].clipped.append(clipped)
        if spec.noise_amplitude:
            noise = rng.integers(-spec.noise_amplitude,
                                 spec.noise_amplitude + 1,
                                 size=plane.shape)
            plane = np.clip(plane.astype(np.int16) + noise, 0, 255) \
                .astype(np.uint8)
        frames.append(LumaFrame(plane))
    return SynthResult(spec=spec, frames=frames, tracks=tracks)
