"""Hexagon-style block search with a per-block step budget.

Control flow per block: evaluate the two init candidates, then either a
short path (init cost under th1: one 4-neighbour local search) or the
long path (local search, then, when the intermediate cost is still at
least th2, a cross search and a multi-hexagon search, then optional
small-hexagon and small-diamond refinements). A StepPlan bounds how
many sub-steps of each kind run; the unconstrained plan reproduces the
full search schedule.

Every candidate displacement is evaluated at most once per block; the
search-point count sp_used equals the number of distinct candidates
evaluated, and re-proposing a visited candidate is free.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .cost import (MV, ZERO_MV, CostParams, clamp_mv, mv_rate_bits,
                   round_half_up)
from .video_io import MB_SIZE, SEARCH_RANGE, LumaFrame, MbIndex, PaddedFrame

# 4-neighbour pattern shared by the local search and the small diamond.
SMALL_DIAMOND = (MV(1, 0), MV(-1, 0), MV(0, 1), MV(0, -1))

# 6-point hexagon used by the first refinement stage.
SMALL_HEX = (MV(2, 0), MV(1, 2), MV(-1, 2), MV(-2, 0), MV(-1, -2), MV(1, -2))

# 16-point hexagon ring, scaled by k for ring k (Chebyshev radius 4k).
HEX16 = (MV(0, 4), MV(-2, 3), MV(-4, 2), MV(-4, 1), MV(-4, 0), MV(-4, -1),
         MV(-4, -2), MV(-2, -3), MV(0, -4), MV(2, -3), MV(4, -2), MV(4, -1),
         MV(4, 0), MV(4, 1), MV(4, 2), MV(2, 3))

MAX_HEX_RINGS = SEARCH_RANGE // 4  # ring radius 4k stays inside the window
REFINE_MAX_PASSES = 16
CROSS_GROUP_SIZE = 4


@dataclass(frozen=True)
class StepPlan:
    """Sub-step counts for one block search.

    c_small_local bounds the local-search evaluations; ns_cross counts
    4-point cross sub-steps; ns_multihex counts 16-point hexagon rings.
    The two flags enable the refinement stages. unconstrained ignores
    all bounds and runs the full schedule.
    """

    c_small_local: int = 4
    ns_cross: int = 0
    ns_multihex: int = 0
    small_hex: bool = False
    small_diamond: bool = False
    unconstrained: bool = False


UNCONSTRAINED_PLAN = StepPlan(small_hex=True, small_diamond=True,
                              unconstrained=True)


@dataclass
class SearchOutcome:
    mv: MV
    cost_init: int
    cost_mid: int
    cost_final: int
    sp_used: int
    path: str  # "short" or "long"
    pmv: MV


def in_window(mv, bound: int = SEARCH_RANGE) -> bool:
    return -bound <= mv[0] <= bound and -bound <= mv[1] <= bound


class SearchContext:
    """Mutable per-block search state.

    Tracks visited candidates with their costs, the running best, and
    the evaluation count. origin_sad, when given, supplies a
    precomputed SAD for (0, 0); the evaluation still charges one search
    point (the prepass work is attributed to this block).
    """

    def __init__(self, cur: LumaFrame, ref: PaddedFrame, mb: MbIndex, pmv,
                 params: CostParams, origin_sad=None):
        self.cur = cur
        self.ref = ref
        self.mb = mb
        self.pmv = clamp_mv(pmv)
        self.params = params
        self.lam = params.lam
        self.block = cur.block(mb).astype(np.int32)
        self.x0 = mb.col * MB_SIZE
        self.y0 = mb.row * MB_SIZE
        self.visited: dict[MV, int] = {}
        self.best_mv: MV = ZERO_MV
        self.best_cost = None
        self.cost_init = None
        self.sp_used = 0
        self._origin_sad = origin_sad

    def _sad(self, mv) -> int:
        ref_block = self.ref.block(self.x0 + mv[0], self.y0 + mv[1])
        return int(np.abs(self.block - ref_block).sum())

    def evaluate(self, mv: MV) -> int:
        """COST at mv; one search point for a first visit, free after."""
        known = self.visited.get(mv)
        if known is not None:
            return known
        if self._origin_sad is not None and mv == ZERO_MV:
            s = self._origin_sad
        else:
            s = self._sad(mv)
        c = s + round_half_up(self.lam * mv_rate_bits(mv, self.pmv))
        self.visited[mv] = c
        self.sp_used += 1
        if self.best_cost is None or c < self.best_cost:
            self.best_cost = c
            self.best_mv = mv
        return c

    def eval_init(self) -> int:
        """Evaluate (0, 0) then the predictor; ties keep (0, 0)."""
        if self.cost_init is not None:
            return self.cost_init
        self.evaluate(ZERO_MV)
        if self.pmv != ZERO_MV:
            self.evaluate(self.pmv)
        self.cost_init = self.best_cost
        return self.cost_init


def _step(ctx: SearchContext, candidates, limit=None) -> int:
    """Evaluate candidates in order; out-of-window and visited ones are
    skipped without consuming the limit. Returns new evaluations."""
    spent = 0
    for mv in candidates:
        if not in_window(mv):
            continue
        if mv in ctx.visited:
            continue
        if limit is not None and spent >= limit:
            break
        ctx.evaluate(mv)
        spent += 1
    return spent


def cross_points(center, bound: int = SEARCH_RANGE) -> list[list[MV]]:
    """Cross-search candidates around center, packed into groups of 4.

    Even strides 2..bound, per stride (+s,0), (-s,0), (0,+s), (0,-s);
    points leaving the window are dropped before grouping, so every
    group except possibly the last holds 4 evaluable points.
    """
    cands = []
    for s in range(2, bound + 1, 2):
        for dx, dy in ((s, 0), (-s, 0), (0, s), (0, -s)):
            mv = MV(center[0] + dx, center[1] + dy)
            if in_window(mv, bound):
                cands.append(mv)
    return [cands[i:i + CROSS_GROUP_SIZE]
            for i in range(0, len(cands), CROSS_GROUP_SIZE)]


def hex_points(center, k: int, bound: int = SEARCH_RANGE) -> list[MV]:
    """Ring k of the 16-point hexagon around center, window-clipped."""
    if k < 1:
        raise ValueError("ring index starts at 1")
    pts = [MV(center[0] + k * p.dx, center[1] + k * p.dy) for p in HEX16]
    return [p for p in pts if in_window(p, bound)]


def refine(ctx: SearchContext, pattern) -> None:
    """Recentering pattern walk; stops when a pass brings no new best."""
    for _ in range(REFINE_MAX_PASSES):
        center = ctx.best_mv
        _step(ctx, [MV(center.dx + p.dx, center.dy + p.dy) for p in pattern])
        if ctx.best_mv == center:
            break


def search_mb(ctx: SearchContext, plan: StepPlan) -> SearchOutcome:
    """Run the block search under the given plan."""
    ctx.eval_init()
    free = plan.unconstrained
    origin = ctx.best_mv
    _step(ctx, [MV(origin.dx + p.dx, origin.dy + p.dy) for p in SMALL_DIAMOND],
          None if free else plan.c_small_local)
    if ctx.cost_init < ctx.params.th1:
        final = ctx.best_cost
        return SearchOutcome(mv=ctx.best_mv, cost_init=ctx.cost_init,
                             cost_mid=final, cost_final=final,
                             sp_used=ctx.sp_used, path="short", pmv=ctx.pmv)
    cost_mid = ctx.best_cost
    if cost_mid >= ctx.params.th2:
        groups = cross_points(ctx.best_mv)
        n_groups = len(groups) if free else min(plan.ns_cross, len(groups))
        for group in groups[:n_groups]:
            _step(ctx, group)
        center = ctx.best_mv
        rings = MAX_HEX_RINGS if free else min(plan.ns_multihex, MAX_HEX_RINGS)
        for k in range(1, rings + 1):
            _step(ctx, hex_points(center, k))
    if free or plan.small_hex:
        refine(ctx, SMALL_HEX)
    if free or plan.small_diamond:
        refine(ctx, SMALL_DIAMOND)
    return SearchOutcome(mv=ctx.best_mv, cost_init=ctx.cost_init,
                         cost_mid=cost_mid, cost_final=ctx.best_cost,
                         sp_used=ctx.sp_used, path="long", pmv=ctx.pmv)


def _component_bits(deltas: np.ndarray) -> np.ndarray:
    out = np.empty(len(deltas), dtype=np.int64)
    for i, d in enumerate(deltas):
        v = 4 * int(d)
        k = -2 * v if v <= 0 else 2 * v - 1
        out[i] = 2 * ((k + 1).bit_length() - 1) + 1
    return out


def sad_window_map(cur: LumaFrame, mb: MbIndex, ref: PaddedFrame,
                   bound: int = SEARCH_RANGE) -> np.ndarray:
    """SAD for every displacement in the window, indexed [dy+b, dx+b]."""
    if ref.pad < bound:
        raise ValueError("reference padding smaller than the search window")
    block = cur.block(mb).astype(np.int32)
    windows = sliding_window_view(ref.plane, (MB_SIZE, MB_SIZE))
    y0 = mb.row * MB_SIZE + ref.pad - bound
    x0 = mb.col * MB_SIZE + ref.pad - bound
    side = 2 * bound + 1
    region = windows[y0:y0 + side, x0:x0 + side].astype(np.int32)
    return np.abs(region - block).sum(axis=(2, 3))


def full_search_oracle(ctx: SearchContext,
                       bound: int = SEARCH_RANGE) -> SearchOutcome:
    """Exhaustive minimum over the whole window.

    Ties break toward the displacement with smaller |dy|, then smaller
    |dx|, then smaller dy, then smaller dx. sp_used counts every
    candidate in the window.
    """
    sad_map = sad_window_map(ctx.cur, ctx.mb, ctx.ref, bound)
    deltas = np.arange(-bound, bound + 1)
    bits_x = _component_bits(deltas - ctx.pmv.dx)
    bits_y = _component_bits(deltas - ctx.pmv.dy)
    rate = bits_y[:, None] + bits_x[None, :]
    cost_map = sad_map + np.floor(ctx.lam * rate + 0.5).astype(np.int64)
    best = int(cost_map.min())
    ys, xs = np.nonzero(cost_map == best)
    _, _, dy, dx = min((abs(int(y) - bound), abs(int(x) - bound),
                        int(y) - bound, int(x) - bound)
                       for y, x in zip(ys, xs))
    c_zero = int(cost_map[bound, bound])
    c_pred = int(cost_map[ctx.pmv.dy + bound, ctx.pmv.dx + bound])
    cost_init = min(c_zero, c_pred)
    path = "short" if cost_init < ctx.params.th1 else "long"
    return SearchOutcome(mv=MV(int(dx), int(dy)), cost_init=cost_init,
                         cost_mid=best, cost_final=best,
                         sp_used=(2 * bound + 1) ** 2, path=path,
                         pmv=ctx.pmv)
