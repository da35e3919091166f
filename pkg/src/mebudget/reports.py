"""Report models and deterministic CSV/JSON emission.

Integers are written verbatim, reals with 6 significant digits, bools
as 1/0, missing values as empty cells. File names are fixed per report
kind so repeated runs with the same config are byte-identical.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import List, Literal, Optional

from pydantic import BaseModel


class FrameRow(BaseModel):
    frame: int
    method: str
    seed: bool
    budget_sp: Optional[int]
    actual_sp: int
    over_budget: bool
    sub_basic: bool
    mb_class1: int
    mb_class2: int
    mb_class3: int
    sp_class1: int
    sp_class2: int
    sp_class3: int
    total_cost: int
    mean_cost_mb: float


class MbRow(BaseModel):
    frame: int
    col: int
    row: int
    mb_class: int
    path: str
    cost_init: int
    cost_mid: int
    cost_final: int
    mv_dx: int
    mv_dy: int
    pmv_dx: int
    pmv_dy: int
    sp_used: int
    c_cur: Optional[int]
    bl: Optional[int]
    al: Optional[int]
    ns_cross: Optional[int]
    ns_multihex: Optional[int]
    small_hex: Optional[bool]
    small_diamond: Optional[bool]


class SequenceAggregates(BaseModel):
    coded_frames: int
    budgeted_frames: int
    mb_per_frame: int
    avg_actual_sp: float
    avg_sp_mb: float
    total_cost: int
    mean_cost_mb: float
    class_pct1: float
    class_pct2: float
    class_pct3: float
    budget_violations: int
    sub_basic_frames: int


class SequenceReport(BaseModel):
    kind: Literal["sequence"] = "sequence"
    method: str
    budget_scale: Optional[float]
    reference_sp_frame: Optional[float]
    budget_sp: Optional[int]
    config: dict
    frames: List[FrameRow]
    aggregates: SequenceAggregates
    mb_log: Optional[List[MbRow]] = None


class CalibrationReport(BaseModel):
    kind: Literal["calibration"] = "calibration"
    reference_sp_frame: float
    per_frame_sp: List[int]
    coded_frames: int
    mb_per_frame: int
    config: dict


class SweepCell(BaseModel):
    method: str
    scale: float
    budget_sp: int
    avg_actual_sp: float
    avg_sp_mb: float
    max_actual_sp: int
    budget_violations: int
    sub_basic_frames: int
    total_cost: int
    mean_cost_mb: float
    cost_inflation_pct: float


class SweepReport(BaseModel):
    kind: Literal["sweep"] = "sweep"
    reference_sp_frame: float
    scales: List[float]
    methods: List[str]
    cells: List[SweepCell]
    config: dict


class DetectionReport(BaseModel):
    kind: Literal["detection"] = "detection"
    coded_frames: int
    scored_frames: int
    total_mbs: int
    class1_mbs: int
    class1_exact: bool
    lower_path_mbs: int
    truth_class2: int
    truth_class3: int
    pred2_truth2: int
    pred3_truth2: int
    pred2_truth3: int
    pred3_truth3: int
    recall_class2: Optional[float]
    recall_class3: Optional[float]
    config: dict


class ClassDistRow(BaseModel):
    c_value: float
    count_class1: int
    count_class2: int
    count_class3: int
    pct_class1: float
    pct_class2: float
    pct_class3: float


class ClassDistributionReport(BaseModel):
    kind: Literal["class_distribution"] = "class_distribution"
    total_mbs: int
    rows: List[ClassDistRow]
    config: dict


class SynthReport(BaseModel):
    kind: Literal["synth"] = "synth"
    path: str
    format: str
    frames: int
    width: int
    height: int
    sha256: str


REPORT_TYPES = (SequenceReport, CalibrationReport, SweepReport,
                DetectionReport, ClassDistributionReport, SynthReport)


def fmt_value(value) -> str:
    """One CSV cell: ints verbatim, reals at 6 significant digits."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def _round_floats(node):
    if isinstance(node, bool):
        return node
    if isinstance(node, float):
        return float(f"{node:.6g}")
    if isinstance(node, list):
        return [_round_floats(v) for v in node]
    if isinstance(node, dict):
        return {k: _round_floats(v) for k, v in node.items()}
    return node


def write_json(report: BaseModel, path: Path) -> Path:
    payload = _round_floats(report.model_dump(mode="json"))
    path.write_text(json.dumps(payload, indent=2) + "\n")
    return path


def write_csv_rows(path: Path, rows: List[BaseModel]) -> Path:
    if not rows:
        path.write_text("")
        return path
    fields = list(rows[0].__class__.model_fields)
    lines = [",".join(fields)]
    for row in rows:
        data = row.model_dump()
        lines.append(",".join(fmt_value(data[f]) for f in fields))
    path.write_text("\n".join(lines) + "\n")
    return path


def emit(report: BaseModel, out_dir, formats=("csv", "json")) -> List[Path]:
    """Write a report under out_dir; returns the paths written."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: List[Path] = []
    kind = report.kind
    if "json" in formats:
        written.append(write_json(report, out / f"{kind}.json"))
    if "csv" not in formats:
        return written
    if isinstance(report, SequenceReport):
        written.append(write_csv_rows(out / "frames.csv", report.frames))
        if report.mb_log is not None:
            written.append(write_csv_rows(out / "mb_decisions.csv",
                                          report.mb_log))
    elif isinstance(report, CalibrationReport):
        lines = ["frame,actual_sp"]
        lines += [f"{i + 1},{sp}" for i, sp in enumerate(report.per_frame_sp)]
        path = out / "calibration.csv"
        path.write_text("\n".join(lines) + "\n")
        written.append(path)
    elif isinstance(report, SweepReport):
        written.append(write_csv_rows(out / "sweep.csv", report.cells))
    elif isinstance(report, DetectionReport):
        fields = [f for f in report.__class__.model_fields
                  if f not in ("kind", "config")]
        data = report.model_dump()
        lines = [",".join(fields),
                 ",".join(fmt_value(data[f]) for f in fields)]
        path = out / "detection.csv"
        path.write_text("\n".join(lines) + "\n")
        written.append(path)
    elif isinstance(report, ClassDistributionReport):
        written.append(write_csv_rows(out / "class_distribution.csv",
                                      report.rows))
    return written
