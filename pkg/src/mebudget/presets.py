"""Bundled synthetic sequences the test suite and docs refer to.

Both are 128x96, 30 frames: small enough that every experiment in the
test suite finishes in seconds, rich enough to exercise all three block
classes. The same content is available to the CLI through the config
files under configs/.
"""

from __future__ import annotations

from .synth import LayerSpec, SynthSpec


def acceptance_preset() -> SynthSpec:
    """Mixed static/texture/moving content for the budget experiments.

    A static noise background keeps most init matches cheap (class 1)
    with steep, alias-free cost surfaces around (0, 0). One checker
    patch drifts right at a constant pixel per frame: the predictor
    tracks it exactly, so its blocks classify as predictable texture.
    A flickering noise band has an irreducible residual high enough to
    trigger the wide search, which then finds nothing (class 3, the
    expensive-futility case); a milder flickering checker band sits in
    between. Budgets scale against a reference dominated by the two
    bands, so moderate scales keep headroom over the basic layers while
    the allocator still cuts the wide-search spend.
    """
    return SynthSpec(
        width=128, height=96, frames=30, seed=1, background=128,
        layers=(
            LayerSpec("noise", (0, 0, 128, 96), amplitude=60),
            LayerSpec("checker", (4, 20, 48, 32), motion=(1, 0),
                      amplitude=60, cell=8),
            LayerSpec("noise", (0, 64, 128, 16), amplitude=60, flicker=30),
            LayerSpec("checker", (0, 80, 128, 16), amplitude=60, cell=4,
                      flicker=12),
        ))


def classification_preset() -> SynthSpec:
    """Textured static background plus an erratic mover.

    Full-frame noise pushes every init cost over the short-path
    threshold while (0, 0) stays the true minimum on the checker
    background, giving a stable class-3 population; the jittering
    checker patch produces predictor misses, the class-2 population
    the detection-rate checks need.
    """
    return SynthSpec(
        width=128, height=96, frames=30, seed=2, background=128,
        noise_amplitude=8,
        layers=(
            LayerSpec("checker", (0, 0, 128, 96), amplitude=60, cell=4),
            LayerSpec("checker", (40, 24, 48, 48), jitter=6, amplitude=60,
                      cell=8),
        ))
