"""Shared fixtures: the two bundled sequences and their cached runs.

The expensive artifacts (synthesized frames, calibration, one run per
method/scale pair, full-search cost maps) are session-scoped so the
module tests and the acceptance checks price them once.

Oracle trust chain: test_cost verifies the rate bits against an
independent codeword enumeration, test_shs verifies sad_window_map and
full_search_oracle against slow double-loop scans; the session oracle
below then reuses the verified vectorized pieces.
"""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from mebudget.cost import CostParams
from mebudget.harness import scaled_budget
from mebudget.pipeline import calibrate_reference, run_coded_frames
from mebudget.presets import acceptance_preset, classification_preset
from mebudget.shs import _component_bits, sad_window_map
from mebudget.synth import synthesize
from mebudget.video_io import SEARCH_RANGE, MbIndex, PaddedFrame

settings.register_profile(
    "suite", max_examples=40, deadline=None, derandomize=True,
    suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("suite")

CCME_SCALES = (400.0, 100.0, 60.0, 40.0)
BASELINE_SCALES = (100.0, 60.0, 40.0)


@pytest.fixture(scope="session")
def params() -> CostParams:
    return CostParams()


@pytest.fixture(scope="session")
def acc_frames():
    return synthesize(acceptance_preset()).frames


@pytest.fixture(scope="session")
def cls_frames():
    return synthesize(classification_preset()).frames


@pytest.fixture(scope="session")
def acc_reference(acc_frames, params):
    reference, per_frame = calibrate_reference(acc_frames, params)
    return reference, per_frame


@pytest.fixture(scope="session")
def acc_runs(acc_frames, params, acc_reference):
    """Every (method, scale) run the acceptance checks compare."""
    reference, _ = acc_reference
    runs = {
        ("shs", None): run_coded_frames(acc_frames, params, "shs"),
        ("full_search", None): run_coded_frames(acc_frames, params,
                                                "full_search"),
    }
    for scale in CCME_SCALES:
        budget = scaled_budget(scale, reference)
        runs[("ccme", scale)] = run_coded_frames(acc_frames, params, "ccme",
                                                 budget)
    for method in ("cost_only", "zero_sad"):
        for scale in BASELINE_SCALES:
            budget = scaled_budget(scale, reference)
            runs[(method, scale)] = run_coded_frames(acc_frames, params,
                                                     method, budget)
    return runs


@pytest.fixture(scope="session")
def cls_shs_run(cls_frames, params):
    return run_coded_frames(cls_frames, params, "shs")


@pytest.fixture(scope="session")
def acc_oracle(acc_frames, params):
    """Memoized exhaustive-search best cost for (frame, mb, pmv).

    SAD maps are shared across predictors, so scoring all runs costs
    one map per macroblock plus a cheap rate grid per distinct pmv.
    """
    lam = params.lam
    deltas = np.arange(-SEARCH_RANGE, SEARCH_RANGE + 1)
    sad_maps: dict = {}
    memo: dict = {}

    def best_cost(frame_index: int, col: int, row: int, pmv) -> int:
        key = (frame_index, col, row, pmv[0], pmv[1])
        hit = memo.get(key)
        if hit is not None:
            return hit
        mb_key = key[:3]
        if mb_key not in sad_maps:
            ref = PaddedFrame(acc_frames[frame_index - 1])
            sad_maps[mb_key] = sad_window_map(acc_frames[frame_index],
                                              MbIndex(col, row), ref)
        rate = (_component_bits(deltas - pmv[1])[:, None]
                + _component_bits(deltas - pmv[0])[None, :])
        cmap = sad_maps[mb_key] + np.floor(lam * rate + 0.5).astype(np.int64)
        memo[key] = int(cmap.min())
        return memo[key]

    return best_cost
