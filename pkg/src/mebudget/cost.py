"""Lagrangian matching cost: 16x16 SAD plus a motion-vector rate term.

COST(mv) = SAD(mv) + round(lambda * R(mv - pmv)) where R charges signed
exp-Golomb bits for both differential components in quarter-pel units
(integer displacement d codes as v = 4d). Rounding is half-up so COST
stays a non-negative integer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .video_io import MB_SIZE, SEARCH_RANGE, LumaFrame, MbIndex, PaddedFrame


class MV(NamedTuple):
    dx: int
    dy: int


ZERO_MV = MV(0, 0)


class CostValue(NamedTuple):
    cost: int
    sad: int
    rate_bits: int


def lambda_for_qp(qp: int) -> float:
    """Motion lambda for a quantiser step, sqrt(0.85 * 2^((qp-12)/3))."""
    if not 0 <= qp <= 51:
        raise ValueError(f"qp out of range [0, 51]: {qp}")
    return math.sqrt(0.85 * 2.0 ** ((qp - 12) / 3.0))


@dataclass(frozen=True)
class CostParams:
    """Matching-cost and classification parameters.

    lambda_motion overrides the qp-derived lambda when set. th1 routes
    blocks with a cheap init match to the short search path; th2 gates
    the expensive wide search steps. class_eps is the improvement
    fraction c used by the ground-truth classifier; pac_threshold is
    the Chebyshev distance bound used by the predictive classifier.
    """

    qp: int = 28
    th1: int = 1000
    th2: int = 5000
    class_eps: float = 0.0
    pac_threshold: int = 1
    lambda_motion: Optional[float] = None

    def __post_init__(self):
        if self.th1 < 0 or self.th2 < 0 or self.th1 > self.th2:
            raise ValueError(f"need 0 <= th1 <= th2, got {self.th1}, {self.th2}")
        if self.class_eps < 0:
            raise ValueError("class_eps must be >= 0")
        if self.pac_threshold < 0:
            raise ValueError("pac_threshold must be >= 0")
        if self.lambda_motion is None:
            lambda_for_qp(self.qp)  # validate qp even when unused later
        elif self.lambda_motion < 0:
            raise ValueError("lambda_motion must be >= 0")

    @property
    def lam(self) -> float:
        if self.lambda_motion is not None:
            return self.lambda_motion
        return lambda_for_qp(self.qp)


def round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def _signed_exp_golomb_bits(v: int) -> int:
    # signed value -> code number k, then ue(k) length = 2*floor(log2(k+1))+1
    k = -2 * v if v <= 0 else 2 * v - 1
    return 2 * ((k + 1).bit_length() - 1) + 1


def mv_rate_bits(mv, pmv) -> int:
    """Bits to code mv - pmv, both components, quarter-pel exp-Golomb."""
    bits = 0
    for d in (mv[0] - pmv[0], mv[1] - pmv[1]):
        bits += _signed_exp_golomb_bits(4 * d)
    return bits


def clamp_mv(mv, bound: int = SEARCH_RANGE) -> MV:
    return MV(max(-bound, min(bound, mv[0])),
              max(-bound, min(bound, mv[1])))


def sad16(cur: LumaFrame, mb: MbIndex, ref: PaddedFrame, mv) -> int:
    """Sum of absolute differences over the 16x16 block displaced by mv."""
    cur_block = cur.block(mb).astype(np.int32)
    ref_block = ref.block(mb.col * MB_SIZE + mv[0], mb.row * MB_SIZE + mv[1])
    return int(np.abs(cur_block - ref_block).sum())


def cost(cur: LumaFrame, mb: MbIndex, ref: PaddedFrame, mv, pmv,
         params: CostParams) -> CostValue:
    """Full matching cost of one candidate displacement."""
    s = sad16(cur, mb, ref, mv)
    r = mv_rate_bits(mv, pmv)
    return CostValue(s + round_half_up(params.lam * r), s, r)


def _median3(a: int, b: int, c: int) -> int:
    return a + b + c - min(a, b, c) - max(a, b, c)


def median_pmv(left, top, topright) -> MV:
    """Component-wise median predictor from the three coded neighbours.

    Missing neighbours count as (0, 0); a single available neighbour is
    returned as-is; no neighbours predict (0, 0).
    """
    present = [n for n in (left, top, topright) if n is not None]
    if not present:
        return ZERO_MV
    if len(present) == 1:
        return MV(present[0][0], present[0][1])
    vals = [n if n is not None else ZERO_MV for n in (left, top, topright)]
    return MV(_median3(vals[0][0], vals[1][0], vals[2][0]),
              _median3(vals[0][1], vals[1][1], vals[2][1]))


def init_cost(cur: LumaFrame, mb: MbIndex, ref: PaddedFrame, pmv,
              params: CostParams):
    """Best of the two starting candidates, (0, 0) and the predictor.

    Returns (CostValue, chosen MV, evaluations spent). The predictor is
    clamped into the search window first; when it coincides with (0, 0)
    only one evaluation is spent, and on an exact cost tie the (0, 0)
    candidate wins.
    """
    pmv = clamp_mv(pmv)
    zero = cost(cur, mb, ref, ZERO_MV, pmv, params)
    if pmv == ZERO_MV:
        return zero, ZERO_MV, 1
    pred = cost(cur, mb, ref, pmv, pmv, params)
    if pred.cost < zero.cost:
        return pred, pmv, 2
    return zero, ZERO_MV, 2
