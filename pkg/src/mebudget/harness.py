"""Experiment orchestration on top of the pipeline.

Calibration (the unconstrained search-point reference a budget scales
against) is cached per input and cost parameters, so a sweep prices all
its cells against one shared reference.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
from pathlib import Path

from .allocate import classify_oracle
from .config import RunConfig, SweepConfig, SynthConfig
from .pipeline import BUDGETED_METHODS, calibrate_reference, run_coded_frames
from .reports import (CalibrationReport, ClassDistributionReport,
                      ClassDistRow, DetectionReport, FrameRow, MbRow,
                      SequenceAggregates, SequenceReport, SweepCell,
                      SweepReport, SynthReport)
from .video_io import write_raw_yuv420, write_y4m

CLASS_DIST_EPS = (0.0, 0.02, 0.04)

_calibration_cache: dict = {}


def _calibration_key(config: RunConfig) -> str:
    relevant = {"input": config.input.model_dump(mode="json"),
                "frames": config.frames, "qp": config.qp,
                "th1": config.th1, "th2": config.th2,
                "lambda_motion": config.lambda_motion, "seed": config.seed}
    return json.dumps(relevant, sort_keys=True)


def clear_calibration_cache():
    _calibration_cache.clear()


def _calibrate(config: RunConfig, frames):
    key = _calibration_key(config)
    hit = _calibration_cache.get(key)
    if hit is None:
        hit = calibrate_reference(frames, config.cost_params())
        _calibration_cache[key] = hit
    return hit


def calibrate(config: RunConfig) -> CalibrationReport:
    frames = config.load_frames()
    reference, per_frame = _calibrate(config, frames)
    return CalibrationReport(reference_sp_frame=reference,
                             per_frame_sp=per_frame,
                             coded_frames=len(frames) - 1,
                             mb_per_frame=frames[1].mb_cols * frames[1].mb_rows,
                             config=config.model_dump(mode="json"))


def _frame_rows(results, nmb):
    rows = []
    for fr in results:
        rows.append(FrameRow(
            frame=fr.index, method=fr.method, seed=fr.is_seed,
            budget_sp=fr.budget, actual_sp=fr.actual_sp,
            over_budget=fr.over_budget, sub_basic=fr.sub_basic,
            mb_class1=fr.class_count[1], mb_class2=fr.class_count[2],
            mb_class3=fr.class_count[3], sp_class1=fr.class_sp[1],
            sp_class2=fr.class_sp[2], sp_class3=fr.class_sp[3],
            total_cost=fr.total_cost, mean_cost_mb=fr.total_cost / nmb))
    return rows


def _aggregates(results, nmb) -> SequenceAggregates:
    # seed frames run unconstrained and stay out of the aggregates,
    # unless the sequence is so short nothing else exists
    scored = [fr for fr in results if not fr.is_seed] or list(results)
    mbs = nmb * len(scored)
    total_sp = sum(fr.actual_sp for fr in scored)
    total_cost = sum(fr.total_cost for fr in scored)
    counts = {c: sum(fr.class_count[c] for fr in scored) for c in (1, 2, 3)}
    return SequenceAggregates(
        coded_frames=len(results),
        budgeted_frames=sum(1 for fr in scored if fr.budget is not None),
        mb_per_frame=nmb,
        avg_actual_sp=total_sp / len(scored),
        avg_sp_mb=total_sp / mbs,
        total_cost=total_cost,
        mean_cost_mb=total_cost / mbs,
        class_pct1=100.0 * counts[1] / mbs,
        class_pct2=100.0 * counts[2] / mbs,
        class_pct3=100.0 * counts[3] / mbs,
        budget_violations=sum(1 for fr in scored if fr.over_budget),
        sub_basic_frames=sum(1 for fr in scored if fr.sub_basic))


def _mb_rows(results):
    rows = []
    for fr in results:
        for r in fr.records:
            rows.append(MbRow(
                frame=r.frame, col=r.col, row=r.row, mb_class=r.mb_class,
                path=r.path, cost_init=r.cost_init, cost_mid=r.cost_mid,
                cost_final=r.cost_final, mv_dx=r.mv.dx, mv_dy=r.mv.dy,
                pmv_dx=r.pmv.dx, pmv_dy=r.pmv.dy, sp_used=r.sp_used,
                c_cur=r.c_cur, bl=r.bl, al=r.al, ns_cross=r.ns_cross,
                ns_multihex=r.ns_multihex, small_hex=r.small_hex,
                small_diamond=r.small_diamond))
    return rows


def _sequence_report(config: RunConfig, frames, method: str, scale,
                     reference) -> SequenceReport:
    params = config.cost_params()
    if method in BUDGETED_METHODS:
        budget = scaled_budget(scale, reference)
        results = run_coded_frames(frames, params, method, budget)
    else:
        budget = None
        results = run_coded_frames(frames, params, method)
    nmb = frames[1].mb_cols * frames[1].mb_rows
    return SequenceReport(
        method=method,
        budget_scale=scale if budget is not None else None,
        reference_sp_frame=reference if budget is not None else None,
        budget_sp=budget,
        config=config.model_dump(mode="json"),
        frames=_frame_rows(results, nmb),
        aggregates=_aggregates(results, nmb),
        mb_log=_mb_rows(results) if config.include_mb_log else None)


def scaled_budget(scale: float, reference: float) -> int:
    """Frame budget at a percentage of the calibrated reference."""
    return math.floor(scale / 100.0 * reference)


def run(config: RunConfig) -> SequenceReport:
    frames = config.load_frames()
    reference = None
    if config.method in BUDGETED_METHODS:
        reference, _ = _calibrate(config, frames)
    return _sequence_report(config, frames, config.method,
                            config.budget_scale, reference)


def sweep(cfg: SweepConfig) -> SweepReport:
    frames = cfg.run.load_frames()
    reference, _ = _calibrate(cfg.run, frames)
    nmb = frames[1].mb_cols * frames[1].mb_rows
    cells = []
    for method in cfg.methods:
        base_cost = None
        by_scale = {}
        for scale in cfg.scales:
            report = _sequence_report(cfg.run, frames, method, scale,
                                      reference)
            by_scale[scale] = report
            if scale == 100.0:
                base_cost = report.aggregates.total_cost
        for scale in cfg.scales:
            agg = by_scale[scale].aggregates
            inflation = 100.0 * (agg.total_cost / base_cost - 1.0) \
                if base_cost else 0.0
            cells.append(SweepCell(
                method=method, scale=scale,
                budget_sp=by_scale[scale].budget_sp,
                avg_actual_sp=agg.avg_actual_sp, avg_sp_mb=agg.avg_sp_mb,
                max_actual_sp=max(fr.actual_sp
                                  for fr in by_scale[scale].frames
                                  if not fr.seed),
                budget_violations=agg.budget_violations,
                sub_basic_frames=agg.sub_basic_frames,
                total_cost=agg.total_cost, mean_cost_mb=agg.mean_cost_mb,
                cost_inflation_pct=inflation))
    return SweepReport(reference_sp_frame=reference,
                       scales=list(cfg.scales), methods=list(cfg.methods),
                       cells=cells, config=cfg.run.model_dump(mode="json"))


def detection(config: RunConfig) -> DetectionReport:
    """Score the predictive classifier against realised search gains.

    One unconstrained run provides both sides. The first coded frame
    has no motion history for the predictor and is not scored.
    """
    frames = config.load_frames()
    params = config.cost_params()
    results = run_coded_frames(frames, params, "shs")
    scored = [fr for fr in results if not fr.is_seed] or list(results)
    total = class1 = lower = 0
    class1_exact = True
    conf = {(2, 2): 0, (2, 3): 0, (3, 2): 0, (3, 3): 0}
    for fr in scored:
        for r in fr.records:
            total += 1
            truth = classify_oracle(r.cost_init, r.cost_mid, r.cost_final,
                                    params)
            if r.path == "short":
                class1 += 1
                class1_exact &= (truth == 1 and r.mb_class == 1)
                continue
            lower += 1
            conf[(truth, r.mb_class)] += 1
    truth2 = conf[(2, 2)] + conf[(2, 3)]
    truth3 = conf[(3, 2)] + conf[(3, 3)]
    return DetectionReport(
        coded_frames=len(results), scored_frames=len(scored),
        total_mbs=total, class1_mbs=class1, class1_exact=class1_exact,
        lower_path_mbs=lower, truth_class2=truth2, truth_class3=truth3,
        pred2_truth2=conf[(2, 2)], pred3_truth2=conf[(2, 3)],
        pred2_truth3=conf[(3, 2)], pred3_truth3=conf[(3, 3)],
        recall_class2=conf[(2, 2)] / truth2 if truth2 else None,
        recall_class3=conf[(3, 3)] / truth3 if truth3 else None,
        config=config.model_dump(mode="json"))


def class_distribution(config: RunConfig) -> ClassDistributionReport:
    """Ground-truth class shares for several improvement margins c."""
    frames = config.load_frames()
    params = config.cost_params()
    results = run_coded_frames(frames, params, "shs")
    records = [r for fr in results for r in fr.records]
    rows = []
    for eps in CLASS_DIST_EPS:
        eps_params = dataclasses.replace(params, class_eps=eps)
        counts = {1: 0, 2: 0, 3: 0}
        for r in records:
            counts[classify_oracle(r.cost_init, r.cost_mid, r.cost_final,
                                   eps_params)] += 1
        rows.append(ClassDistRow(
            c_value=eps,
            count_class1=counts[1], count_class2=counts[2],
            count_class3=counts[3],
            pct_class1=100.0 * counts[1] / len(records),
            pct_class2=100.0 * counts[2] / len(records),
            pct_class3=100.0 * counts[3] / len(records)))
    return ClassDistributionReport(total_mbs=len(records), rows=rows,
                                   config=config.model_dump(mode="json"))


def synth_clip(synth: SynthConfig, path, fmt: str = "y4m",
               fallback_seed: int = 0) -> SynthReport:
    """Materialise a synthetic clip to disk."""
    from .synth import synthesize

    spec = synth.to_spec(fallback_seed)
    frames = synthesize(spec).frames
    path = Path(path)
    if fmt == "y4m":
        write_y4m(path, frames)
    elif fmt == "yuv420":
        write_raw_yuv420(path, frames)
    else:
        raise ValueError(f"unknown clip format {fmt!r}")
    digest = hashlib.sha256(path.read_bytes()).hexdigest()
    return SynthReport(path=str(path), format=fmt, frames=spec.frames,
                       width=spec.width, height=spec.height, sha256=digest)
