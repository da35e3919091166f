"""Reference allocators that skip classification.

cost_only keeps one frame-wide pool and hands each block a share
proportional to its init cost. zero_sad spends one prepass evaluation
per block on the undisplaced SAD and splits the pool proportional to
those, fixed for the whole frame.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .allocate import MbBudget
from .cost import sad16, ZERO_MV
from .video_io import LumaFrame, MbIndex, PaddedFrame

BL_POOL = 6
AL_POOL_MAX = 244  # per-block additional cap, BL_POOL + cap = 250


@dataclass
class PoolState:
    """Single-pool allocation state for the cost_only baseline."""

    c_f: int
    ab: int
    nm: int
    sub_basic: bool
    prev_avg_init: float | None = None
    run_init_sum: int = 0
    run_count: int = 0

    def avg_init(self, cost_init: int) -> float:
        if self.run_count > 0:
            return self.run_init_sum / self.run_count
        if self.prev_avg_init:
            return self.prev_avg_init
        return float(cost_init) if cost_init > 0 else 1.0


def pool_init(c_f: int, nmb: int, prev_avg_init=None) -> PoolState:
    """Reserve the basic layer for every block, pool the rest."""
    if c_f < 0 or nmb <= 0:
        raise ValueError("need c_f >= 0 and at least one block")
    ab = c_f - BL_POOL * nmb
    sub_basic = ab < 0
    return PoolState(c_f=c_f, ab=max(ab, 0), nm=nmb, sub_basic=sub_basic,
                     prev_avg_init=prev_avg_init)


def cost_only_allocate(pool: PoolState, cost_init: int) -> MbBudget:
    """Share of the remaining pool scaled by init cost."""
    share = (cost_init / pool.avg_init(cost_init)) * pool.ab / max(pool.nm, 1)
    al = min(max(math.floor(share), 0), AL_POOL_MAX)
    return MbBudget(c_cur=BL_POOL + al, bl=BL_POOL, al=al)


def pool_update(pool: PoolState, ca_used: int, bl_given: int,
                cost_init: int) -> None:
    pool.ab -= ca_used - bl_given
    pool.nm = max(pool.nm - 1, 0)
    pool.run_count += 1
    pool.run_init_sum += cost_init


@dataclass
class PrepassTable:
    """Frame-fixed allocation from undisplaced SADs.

    The prepass spends one evaluation per block; the pool therefore
    reserves BL_POOL + 1 per block before sharing the rest.
    """

    c_f: int
    al_budget: int
    total_sad: int
    sub_basic: bool
    sad00: dict[MbIndex, int] = field(default_factory=dict)


def zero_sad_prepass(cur: LumaFrame, ref: PaddedFrame, c_f: int) -> PrepassTable:
    """Evaluate SAD at (0, 0) for every block and fix the pool."""
    if c_f < 0:
        raise ValueError("frame budget must be >= 0")
    sad00 = {}
    for row in range(cur.mb_rows):
        for col in range(cur.mb_cols):
            mb = MbIndex(col, row)
            sad00[mb] = sad16(cur, mb, ref, ZERO_MV)
    nmb = len(sad00)
    al_budget = c_f - BL_POOL * nmb - nmb
    sub_basic = al_budget < 0
    return PrepassTable(c_f=c_f, al_budget=max(al_budget, 0),
                        total_sad=sum(sad00.values()), sub_basic=sub_basic,
                        sad00=sad00)


def zero_sad_allocate(table: PrepassTable, mb: MbIndex) -> MbBudget:
    """Fixed proportional share of the pool for one block."""
    sad = table.sad00[mb]
    if table.total_sad > 0:
        al = min((table.al_budget * sad) // table.total_sad, AL_POOL_MAX)
    else:
        al = 0
    return MbBudget(c_cur=BL_POOL + al, bl=BL_POOL, al=al)
