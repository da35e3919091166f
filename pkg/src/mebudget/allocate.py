"""Class-based computation allocation across a frame's macroblocks.

Blocks fall into three classes: cheap init match (class 1), helped by
wide search (class 2), not helped by wide search (class 3). The frame
budget is split per class from the previous frame's actuals (class
layer allocation), handed out block by block scaled by init cost
(macroblock layer allocation), and mapped to search sub-steps (step
layer allocation). Class state updates after every block so refunds
from cheap blocks flow to later ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .cost import MV, ZERO_MV
from .shs import StepPlan
from .video_io import MbIndex

CLASSES = (1, 2, 3)

# Basic layer per class; class 2 usually carries the wide-search floor.
BL_MB = {1: 6, 2: 25, 3: 6}
BL_MB_FALLBACK = 6  # class-2 floor once its additional pool is spent

MAX_SP_PER_MB = 250
AL_MB_MAX = {c: MAX_SP_PER_MB - BL_MB[c] for c in CLASSES}

# Step layer constants: minimum local-search share, sub-step sizes, and
# the runtime fractions granted to the cross and multi-hexagon stages.
C_STEP_MIN = 4
CS_CROSS = 4
CS_MULTIHEX = 16
RT_CROSS = 0.32
RT_MULTIHEX = 0.64


def classify_pac(cost_init: int, pmv, mv_pre_final, params) -> int:
    """Predictive class from the init cost and predictor accuracy.

    Class 1 when the init match is already cheap; otherwise class 2
    when the predictor disagrees with the co-located previous final MV
    by more than the Chebyshev threshold (prediction inaccurate, wide
    search likely to help), else class 3.
    """
    if cost_init < params.th1:
        return 1
    dist = max(abs(pmv[0] - mv_pre_final[0]), abs(pmv[1] - mv_pre_final[1]))
    return 2 if dist > params.pac_threshold else 3


def classify_oracle(cost_init: int, cost_mid: int, cost_final: int,
                    params) -> int:
    """Ground-truth class from realised search gains.

    Class 2 when the wide search improved on the intermediate cost by
    more than class_eps * cost_mid, class 3 otherwise; class 1 keeps
    the same cheap-init rule as the predictive classifier.
    """
    if cost_init < params.th1:
        return 1
    if cost_mid - cost_final > params.class_eps * cost_mid:
        return 2
    return 3


@dataclass
class PrevFrameStats:
    """Previous-frame actuals that seed the next frame's allocation."""

    nm_pre: dict[int, int] = field(default_factory=lambda: dict.fromkeys(CLASSES, 0))
    ca_pre: dict[int, int] = field(default_factory=lambda: dict.fromkeys(CLASSES, 0))
    avg_init_pre: dict[int, float | None] = field(
        default_factory=lambda: dict.fromkeys(CLASSES, None))
    mv_final_map: dict[MbIndex, MV] = field(default_factory=dict)

    def mv_pre_final(self, mb: MbIndex) -> MV:
        return self.mv_final_map.get(mb, ZERO_MV)


@dataclass
class MbBudget:
    c_cur: int
    bl: int
    al: int


@dataclass
class ClassBudgetState:
    """Mutable per-frame allocation state."""

    c_f: int
    bl_class: dict[int, int]
    al_class: dict[int, int]
    ab: dict[int, int]          # remaining additional pool per class
    nm: dict[int, int]          # expected blocks remaining per class
    sub_basic: bool
    prev: PrevFrameStats
    run_count: dict[int, int] = field(default_factory=lambda: dict.fromkeys(CLASSES, 0))
    run_sp: dict[int, int] = field(default_factory=lambda: dict.fromkeys(CLASSES, 0))
    run_init_sum: dict[int, int] = field(default_factory=lambda: dict.fromkeys(CLASSES, 0))
    run_mv_final: dict[MbIndex, MV] = field(default_factory=dict)

    def avg_init(self, mb_class: int, cost_init: int) -> float:
        """Scale reference for the init-cost ratio, with fallbacks."""
        if self.run_count[mb_class] > 0:
            return self.run_init_sum[mb_class] / self.run_count[mb_class]
        prev = self.prev.avg_init_pre.get(mb_class)
        if prev:
            return prev
        return float(cost_init) if cost_init > 0 else 1.0


def cla(c_f: int, prev: PrevFrameStats) -> ClassBudgetState:
    """Class layer allocation: split the frame budget by class.

    Basic layers reserve BL_MB per expected block; the additional pool
    is shared between classes 2 and 3 proportionally to their
    previous-frame actuals, with the class-2 share capped at its
    per-block maximum times the expected class-2 count.
    """
    if c_f < 0:
        raise ValueError("frame budget must be >= 0")
    nm = {c: prev.nm_pre[c] for c in CLASSES}
    bl_class = {c: BL_MB[c] * nm[c] for c in CLASSES}
    bl_f = sum(bl_class.values())
    al_f = c_f - bl_f
    sub_basic = al_f < 0
    if sub_basic:
        al_f = 0
    ca2, ca3 = prev.ca_pre[2], prev.ca_pre[3]
    if ca2 + ca3 > 0:
        al2 = min((al_f * ca2) // (ca2 + ca3), AL_MB_MAX[2] * nm[2])
    else:
        al2 = 0
    al3 = al_f - al2
    al_class = {1: 0, 2: al2, 3: al3}
    return ClassBudgetState(c_f=c_f, bl_class=bl_class, al_class=al_class,
                            ab={1: 0, 2: al2, 3: al3}, nm=nm,
                            sub_basic=sub_basic, prev=prev)


def mla(state: ClassBudgetState, mb_class: int, cost_init: int) -> MbBudget:
    """Macroblock layer allocation for the next block of a class.

    Class 1 gets its basic layer only. Classes 2 and 3 add a share of
    the remaining class pool scaled by cost_init relative to the class
    average, clamped to [0, AL_MB_MAX]. Class 2 drops to the fallback
    basic layer once its pool is gone and no class-2 blocks remain.
    """
    if mb_class == 1:
        return MbBudget(c_cur=BL_MB[1], bl=BL_MB[1], al=0)
    if mb_class == 2 and not (state.ab[2] > 0 or state.nm[2] > 1):
        bl = BL_MB_FALLBACK
    else:
        bl = BL_MB[mb_class]
    avg = state.avg_init(mb_class, cost_init)
    share = (cost_init / avg) * state.ab[mb_class] / max(state.nm[mb_class], 1)
    al = min(max(math.floor(share), 0), AL_MB_MAX[mb_class])
    return MbBudget(c_cur=bl + al, bl=bl, al=al)


def update_after_mb(state: ClassBudgetState, mb_class: int, ca_used: int,
                    bl_given: int, *, cost_init: int, mb: MbIndex,
                    mv_final: MV) -> None:
    """Charge a finished block against its class and log its actuals.

    The pool pays only the spend above the granted basic layer, so a
    block that stopped early refunds its unused share.
    """
    state.ab[mb_class] -= ca_used - bl_given
    state.nm[mb_class] = max(state.nm[mb_class] - 1, 0)
    state.run_count[mb_class] += 1
    state.run_sp[mb_class] += ca_used
    state.run_init_sum[mb_class] += cost_init
    state.run_mv_final[mb] = mv_final


def end_of_frame(state: ClassBudgetState) -> PrevFrameStats:
    """Fold the frame's actuals into stats for the next frame.

    Classes that coded no blocks carry the previous average forward.
    """
    avg = {}
    for c in CLASSES:
        if state.run_count[c] > 0:
            avg[c] = state.run_init_sum[c] / state.run_count[c]
        else:
            avg[c] = state.prev.avg_init_pre.get(c)
    return PrevFrameStats(nm_pre=dict(state.run_count),
                          ca_pre=dict(state.run_sp),
                          avg_init_pre=avg,
                          mv_final_map=dict(state.run_mv_final))


def sla(c_cur: int) -> StepPlan:
    """Step layer allocation: map a block budget to sub-step counts.

    The local search keeps C_STEP_MIN points; the remainder funds
    ns_cross 4-point cross sub-steps (32% of remaining runtime) and
    ns_multihex 16-point rings (64%), in exact integer arithmetic:
    ns_cross = 2*(c-4)//25, ns_multihex = (c-4)//25. Refinements turn
    on once the wide search got more than one sub-step in total
    (small hexagon) or more than one cross sub-step (small diamond).
    """
    rem = c_cur - C_STEP_MIN
    if rem <= 0:
        ns_cross = ns_multihex = 0
    else:
        ns_cross = 2 * rem // 25
        ns_multihex = rem // 25
    return StepPlan(c_small_local=C_STEP_MIN,
                    ns_cross=ns_cross,
                    ns_multihex=ns_multihex,
                    small_hex=ns_cross + ns_multihex > 1,
                    small_diamond=ns_cross > 1)
