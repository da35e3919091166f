"""Computation-budgeted block motion estimation.

Core layers: video_io/synth (frames), cost (matching cost), shs (the
search engine), allocate (class-based budgeting), baselines (simpler
allocators), pipeline (sequence execution). harness/reports/service/cli
wrap those into experiments, files, and interfaces.
"""

__version__ = "0.1.0"

from .allocate import PrevFrameStats, classify_oracle, classify_pac, cla, \
    end_of_frame, mla, sla, update_after_mb
from .cost import MV, CostParams, CostValue, cost, init_cost, \
    lambda_for_qp, median_pmv, mv_rate_bits, sad16
from .pipeline import calibrate_reference, run_coded_frames, run_frame
from .shs import SearchContext, SearchOutcome, StepPlan, \
    UNCONSTRAINED_PLAN, full_search_oracle, search_mb
from .synth import LayerSpec, SynthSpec, synthesize
from .video_io import LumaFrame, MbIndex, PaddedFrame, VideoFormatError, \
    load_raw_yuv420, load_y4m, write_raw_yuv420, write_y4m

__all__ = [
    "__version__",
    "MV", "CostParams", "CostValue", "cost", "init_cost", "lambda_for_qp",
    "median_pmv", "mv_rate_bits", "sad16",
    "LumaFrame", "MbIndex", "PaddedFrame", "VideoFormatError",
    "load_raw_yuv420", "load_y4m", "write_raw_yuv420", "write_y4m",
    "LayerSpec", "SynthSpec", "synthesize",
    "SearchContext", "SearchOutcome", "StepPlan", "UNCONSTRAINED_PLAN",
    "full_search_oracle", "search_mb",
    "PrevFrameStats", "classify_oracle", "classify_pac", "cla",
    "end_of_frame", "mla", "sla", "update_after_mb",
    "calibrate_reference", "run_coded_frames", "run_frame",
]
