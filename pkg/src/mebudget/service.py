"""HTTP service exposing the experiment harness.

Request bodies are validated RunConfig models; responses are the same
report models the emitters consume, so a client can rebuild identical
CSV/JSON artifacts locally. Input problems (missing or malformed clips)
map to 400, configuration problems to 422.
"""

from __future__ import annotations

from typing import List, Literal, Optional

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel

from . import __version__, harness
from .config import (ConfigError, RunConfig, SweepConfig, SynthConfig,
                     plain_error)
from .reports import (CalibrationReport, ClassDistributionReport,
                      DetectionReport, SequenceReport, SweepReport,
                      SynthReport)
from .video_io import VideoFormatError

app = FastAPI(title="mebudget", version=__version__)


class RunRequest(BaseModel):
    config: RunConfig


class SweepRequest(BaseModel):
    config: RunConfig
    scales: List[float] = [100.0, 60.0, 40.0]
    methods: List[Literal["ccme", "cost_only", "zero_sad"]] = \
        ["ccme", "cost_only", "zero_sad"]


class SynthRequest(BaseModel):
    synth: SynthConfig
    path: str
    format: Literal["y4m", "yuv420"] = "y4m"
    seed: Optional[int] = None


def _guarded(fn, *args):
    try:
        return fn(*args)
    except (VideoFormatError, FileNotFoundError, IsADirectoryError) as exc:
        raise HTTPException(status_code=400,
                            detail=f"input error: {exc}") from exc
    except (ConfigError, ValueError) as exc:
        raise HTTPException(status_code=422,
                            detail=f"config error: {plain_error(exc)}") \
            from exc


@app.get("/health")
def health():
    return {"status": "ok", "version": __version__}


@app.post("/calibrate", response_model=CalibrationReport)
def calibrate(req: RunRequest):
    return _guarded(harness.calibrate, req.config)


@app.post("/run", response_model=SequenceReport)
def run(req: RunRequest):
    return _guarded(harness.run, req.config)


@app.post("/sweep", response_model=SweepReport)
def sweep(req: SweepRequest):
    def go():
        cfg = SweepConfig(run=req.config, scales=req.scales,
                          methods=req.methods)
        return harness.sweep(cfg)
    return _guarded(go)


@app.post("/detection", response_model=DetectionReport)
def detection(req: RunRequest):
    return _guarded(harness.detection, req.config)


@app.post("/class-distribution", response_model=ClassDistributionReport)
def class_distribution(req: RunRequest):
    return _guarded(harness.class_distribution, req.config)


@app.post("/synth", response_model=SynthReport)
def synth(req: SynthRequest):
    return _guarded(harness.synth_clip, req.synth, req.path, req.format,
                    req.seed if req.seed is not None else 0)
