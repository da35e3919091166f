"""Report formatting and deterministic emission."""

import json

from mebudget.reports import (CalibrationReport, ClassDistributionReport,
                              ClassDistRow, FrameRow, SequenceAggregates,
                              SequenceReport, _round_floats, emit, fmt_value,
                              write_csv_rows, write_json)


def frame_row(frame=1, **overrides):
    base = dict(frame=frame, method="ccme", seed=False, budget_sp=575,
                actual_sp=431, over_budget=False, sub_basic=False,
                mb_class1=40, mb_class2=3, mb_class3=5, sp_class1=200,
                sp_class2=100, sp_class3=131, total_cost=123456,
                mean_cost_mb=2572.0)
    base.update(overrides)
    return FrameRow(**base)


def sequence_report():
    agg = SequenceAggregates(coded_frames=2, budgeted_frames=1,
                             mb_per_frame=48, avg_actual_sp=431.0,
                             avg_sp_mb=8.979166667, total_cost=123456,
                             mean_cost_mb=2572.0, class_pct1=83.33333,
                             class_pct2=6.25, class_pct3=10.41667,
                             budget_violations=0, sub_basic_frames=0)
    return SequenceReport(method="ccme", budget_scale=40.0,
                          reference_sp_frame=1439.0, budget_sp=575,
                          config={"qp": 28},
                          frames=[frame_row(1, seed=True, budget_sp=None),
                                  frame_row(2)],
                          aggregates=agg)


class TestFmtValue:
    def test_missing_is_empty(self):
        assert fmt_value(None) == ""

    def test_bools_are_numeric_flags(self):
        assert fmt_value(True) == "1"
        assert fmt_value(False) == "0"

    def test_ints_verbatim(self):
        assert fmt_value(0) == "0"
        assert fmt_value(-7) == "-7"
        assert fmt_value(123456789012) == "123456789012"

    def test_floats_six_significant_digits(self):
        assert fmt_value(8.979166667) == "8.97917"
        assert fmt_value(0.000123456789) == "0.000123457"
        assert fmt_value(1234567.89) == "1.23457e+06"
        assert fmt_value(3.0) == "3"

    def test_strings_pass_through(self):
        assert fmt_value("ccme") == "ccme"


class TestRoundFloats:
    def test_nested_rounding(self):
        node = {"a": [1.23456789, {"b": 2.0}], "c": True, "d": 7}
        out = _round_floats(node)
        assert out == {"a": [1.23457, {"b": 2.0}], "c": True, "d": 7}
        assert out["c"] is True  # bool must not degrade to float


class TestCsv:
    def test_header_matches_field_order(self, tmp_path):
        path = write_csv_rows(tmp_path / "rows.csv", [frame_row()])
        header = path.read_text().splitlines()[0]
        assert header.split(",") == list(FrameRow.model_fields)

    def test_values_formatted_per_cell(self, tmp_path):
        path = write_csv_rows(tmp_path / "rows.csv",
                              [frame_row(seed=True, budget_sp=None)])
        line = path.read_text().splitlines()[1].split(",")
        cols = list(FrameRow.model_fields)
        assert line[cols.index("seed")] == "1"
        assert line[cols.index("budget_sp")] == ""
        assert line[cols.index("mean_cost_mb")] == "2572"

    def test_empty_rows_empty_file(self, tmp_path):
        path = write_csv_rows(tmp_path / "rows.csv", [])
        assert path.read_text() == ""


class TestJson:
    def test_payload_parses_and_rounds(self, tmp_path):
        path = write_json(sequence_report(), tmp_path / "out.json")
        text = path.read_text()
        assert text.endswith("\n")
        payload = json.loads(text)
        assert payload["kind"] == "sequence"
        assert payload["aggregates"]["avg_sp_mb"] == 8.97917
        assert payload["frames"][0]["seed"] is True


class TestEmit:
    def test_sequence_filenames(self, tmp_path):
        written = emit(sequence_report(), tmp_path)
        assert [p.name for p in written] == ["sequence.json", "frames.csv"]

    def test_calibration_filenames_and_layout(self, tmp_path):
        report = CalibrationReport(reference_sp_frame=1439.0,
                                   per_frame_sp=[1400, 1478],
                                   coded_frames=2, mb_per_frame=48,
                                   config={})
        written = emit(report, tmp_path)
        assert [p.name for p in written] == ["calibration.json",
                                             "calibration.csv"]
        lines = (tmp_path / "calibration.csv").read_text().splitlines()
        assert lines == ["frame,actual_sp", "1,1400", "2,1478"]

    def test_class_distribution_filenames(self, tmp_path):
        row = ClassDistRow(c_value=0.0, count_class1=1, count_class2=2,
                           count_class3=3, pct_class1=16.66667,
                           pct_class2=33.33333, pct_class3=50.0)
        report = ClassDistributionReport(total_mbs=6, rows=[row], config={})
        names = [p.name for p in emit(report, tmp_path)]
        assert names == ["class_distribution.json",
                         "class_distribution.csv"]

    def test_json_only_format_selection(self, tmp_path):
        written = emit(sequence_report(), tmp_path, formats=("json",))
        assert [p.name for p in written] == ["sequence.json"]
        assert not (tmp_path / "frames.csv").exists()

    def test_repeat_emission_byte_identical(self, tmp_path):
        a = tmp_path / "a"
        b = tmp_path / "b"
        emit(sequence_report(), a)
        emit(sequence_report(), b)
        for name in ("sequence.json", "frames.csv"):
            assert (a / name).read_bytes() == (b / name).read_bytes()
