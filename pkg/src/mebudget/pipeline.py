"""Sequence execution: per-block search driven by a per-frame allocator.

Every consecutive frame pair (previous frame as reference) is one coded
frame. The first coded frame always runs the unconstrained search
regardless of method: it seeds the per-class statistics the allocators
need, is flagged as the seed frame, and stays outside budget
accounting. Blocks are coded in raster order; each block's motion
predictor is the component-wise median of its coded neighbours' final
vectors, and its class is logged for every method even when the
allocator ignores it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .allocate import (CLASSES, PrevFrameStats, cla, classify_pac,
                       end_of_frame, mla, sla, update_after_mb)
from .baselines import (cost_only_allocate, pool_init, pool_update,
                        zero_sad_allocate, zero_sad_prepass)
from .cost import MV, CostParams, median_pmv
from .shs import (UNCONSTRAINED_PLAN, SearchContext, full_search_oracle,
                  search_mb)
from .video_io import LumaFrame, MbIndex, PaddedFrame

METHODS = ("shs", "full_search", "ccme", "cost_only", "zero_sad")
BUDGETED_METHODS = ("ccme", "cost_only", "zero_sad")


@dataclass
class MbRecord:
    frame: int
    col: int
    row: int
    mb_class: int
    path: str
    cost_init: int
    cost_mid: int
    cost_final: int
    mv: MV
    pmv: MV
    sp_used: int
    c_cur: Optional[int] = None
    bl: Optional[int] = None
    al: Optional[int] = None
    ns_cross: Optional[int] = None
    ns_multihex: Optional[int] = None
    small_hex: Optional[bool] = None
    small_diamond: Optional[bool] = None


@dataclass
class FrameResult:
    index: int              # coded-frame number, 1-based
    method: str             # mode actually run on this frame
    is_seed: bool
    budget: Optional[int]
    sub_basic: bool
    records: list[MbRecord]
    actual_sp: int
    class_count: dict[int, int]
    class_sp: dict[int, int]
    total_cost: int

    @property
    def over_budget(self) -> bool:
        return self.budget is not None and self.actual_sp > self.budget


def stats_from_records(records, prev: Optional[PrevFrameStats]) -> PrevFrameStats:
    """Fold any frame's records into allocator-seeding statistics."""
    stats = PrevFrameStats()
    init_sum = dict.fromkeys(CLASSES, 0)
    for r in records:
        stats.nm_pre[r.mb_class] += 1
        stats.ca_pre[r.mb_class] += r.sp_used
        init_sum[r.mb_class] += r.cost_init
        stats.mv_final_map[MbIndex(r.col, r.row)] = r.mv
    for c in CLASSES:
        if stats.nm_pre[c] > 0:
            stats.avg_init_pre[c] = init_sum[c] / stats.nm_pre[c]
        elif prev is not None:
            stats.avg_init_pre[c] = prev.avg_init_pre.get(c)
    return stats


def overall_avg_init(stats: Optional[PrevFrameStats]):
    if stats is None:
        return None
    total = sum(stats.nm_pre.values())
    if total == 0:
        return None
    weighted = sum(stats.avg_init_pre[c] * stats.nm_pre[c]
                   for c in CLASSES if stats.nm_pre[c] > 0)
    return weighted / total


def _neighbour_mvs(mv_grid, col, row, cols):
    left = mv_grid.get((col - 1, row)) if col > 0 else None
    top = mv_grid.get((col, row - 1)) if row > 0 else None
    topright = mv_grid.get((col + 1, row - 1)) \
        if row > 0 and col + 1 < cols else None
    return left, top, topright


def run_frame(cur: LumaFrame, ref: PaddedFrame, params: CostParams,
              mode: str, frame_index: int, *, is_seed: bool = False,
              c_f: Optional[int] = None,
              prev: Optional[PrevFrameStats] = None,
              pool_prev_avg=None):
    """Code one frame. Returns (FrameResult, stats for the next frame)."""
    if mode not in METHODS:
        raise ValueError(f"unknown method {mode!r}")
    budgeted = mode in BUDGETED_METHODS
    if budgeted and c_f is None:
        raise ValueError(f"method {mode!r} needs a frame budget")
    if prev is None:
        prev = PrevFrameStats()

    state = pool = table = None
    sub_basic = False
    if mode == "ccme":
        state = cla(c_f, prev)
        sub_basic = state.sub_basic
    elif mode == "cost_only":
        pool = pool_init(c_f, cur.mb_cols * cur.mb_rows, pool_prev_avg)
        sub_basic = pool.sub_basic
    elif mode == "zero_sad":
        table = zero_sad_prepass(cur, ref, c_f)
        sub_basic = table.sub_basic

    records = []
    mv_grid: dict[tuple[int, int], MV] = {}
    for row in range(cur.mb_rows):
        for col in range(cur.mb_cols):
            mb = MbIndex(col, row)
            pmv = median_pmv(*_neighbour_mvs(mv_grid, col, row, cur.mb_cols))
            origin_sad = table.sad00[mb] if table is not None else None
            ctx = SearchContext(cur, ref, mb, pmv, params,
                                origin_sad=origin_sad)
            if mode == "full_search":
                outcome = full_search_oracle(ctx)
                cost_init = outcome.cost_init
            else:
                cost_init = ctx.eval_init()
            mb_class = classify_pac(cost_init, ctx.pmv,
                                    prev.mv_pre_final(mb), params)
            budget = None
            if mode == "ccme":
                budget = mla(state, mb_class, cost_init)
            elif mode == "cost_only":
                budget = cost_only_allocate(pool, cost_init)
            elif mode == "zero_sad":
                budget = zero_sad_allocate(table, mb)
            if mode == "full_search":
                plan = None
            elif budget is None:
                plan = UNCONSTRAINED_PLAN
                outcome = search_mb(ctx, plan)
            else:
                plan = sla(budget.c_cur)
                outcome = search_mb(ctx, plan)
            if mode == "ccme":
                update_after_mb(state, mb_class, outcome.sp_used, budget.bl,
                                cost_init=cost_init, mb=mb, mv_final=outcome.mv)
            elif mode == "cost_only":
                pool_update(pool, outcome.sp_used, budget.bl, cost_init)
            mv_grid[(col, row)] = outcome.mv
            records.append(MbRecord(
                frame=frame_index, col=col, row=row, mb_class=mb_class,
                path=outcome.path, cost_init=outcome.cost_init,
                cost_mid=outcome.cost_mid, cost_final=outcome.cost_final,
                mv=outcome.mv, pmv=outcome.pmv, sp_used=outcome.sp_used,
                c_cur=None if budget is None else budget.c_cur,
                bl=None if budget is None else budget.bl,
                al=None if budget is None else budget.al,
                ns_cross=None if plan is None else plan.ns_cross,
                ns_multihex=None if plan is None else plan.ns_multihex,
                small_hex=None if plan is None else plan.small_hex,
                small_diamond=None if plan is None else plan.small_diamond))

    class_count = dict.fromkeys(CLASSES, 0)
    class_sp = dict.fromkeys(CLASSES, 0)
    for r in records:
        class_count[r.mb_class] += 1
        class_sp[r.mb_class] += r.sp_used
    result = FrameResult(
        index=frame_index, method=mode, is_seed=is_seed,
        budget=None if not budgeted else c_f, sub_basic=sub_basic,
        records=records, actual_sp=sum(r.sp_used for r in records),
        class_count=class_count, class_sp=class_sp,
        total_cost=sum(r.cost_final for r in records))
    if mode == "ccme":
        next_stats = end_of_frame(state)
    else:
        next_stats = stats_from_records(records, prev)
    return result, next_stats


def run_coded_frames(frames, params: CostParams, method: str,
                     c_f: Optional[int] = None) -> list[FrameResult]:
    """Code frames 1..N-1 against their predecessors.

    Budgeted methods get c_f search points per frame from the second
    coded frame on; the first coded frame seeds statistics with the
    unconstrained search.
    """
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}")
    if len(frames) < 2:
        raise ValueError("need at least two frames to code one")
    if method in BUDGETED_METHODS and c_f is None:
        raise ValueError(f"method {method!r} needs a frame budget")
    results = []
    prev = None
    prev_overall = None
    for t in range(1, len(frames)):
        ref = PaddedFrame(frames[t - 1])
        is_seed = t == 1
        if method in BUDGETED_METHODS and is_seed:
            mode, budget = "shs", None
        elif method in BUDGETED_METHODS:
            mode, budget = method, c_f
        else:
            mode, budget = method, None
        result, stats = run_frame(frames[t], ref, params, mode, t,
                                  is_seed=is_seed, c_f=budget, prev=prev,
                                  pool_prev_avg=prev_overall)
        results.append(result)
        prev = stats
        prev_overall = overall_avg_init(stats)
    return results


def calibrate_reference(frames, params: CostParams):
    """Mean unconstrained search points per coded frame.

    Returns (reference, per-frame actuals). Budgets are set as a
    percentage of this reference.
    """
    results = run_coded_frames(frames, params, "shs")
    actuals = [r.actual_sp for r in results]
    return sum(actuals) / len(actuals), actuals
