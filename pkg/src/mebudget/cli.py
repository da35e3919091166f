"""Command-line client for the experiment service.

Commands post to an in-process service instance by default; --server
targets a running remote one instead. Reports come back as JSON and are
re-validated locally, so emitted CSV/JSON files are byte-identical
either way. A config file (`key = value` lines, CLI flag names) can
replace flags; explicit flags win on conflict.

Exit codes: 0 success, 1 configuration error, 2 input error, 3 budget
violation under --strict.
"""

from __future__ import annotations

import json
import sys
import warnings

import click
import httpx

from . import __version__
from .config import (ConfigError, assemble_run_config, merge_options,
                     parse_config_file, parse_method_list, parse_scale_list)
from .reports import (CalibrationReport, ClassDistributionReport,
                      DetectionReport, SequenceReport, SweepReport,
                      SynthReport, emit, fmt_value)

EXIT_CONFIG = 1
EXIT_INPUT = 2
EXIT_STRICT = 3


class CliExit(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code
        self.message = message


class ServiceClient:
    """POSTs to a remote server when given, else to the in-process app."""

    def __init__(self, server=None):
        if server:
            self._client = httpx.Client(base_url=server, timeout=600.0)
        else:
            # the import warns about an httpx version pin; keep that
            # chatter off the console for every in-process invocation
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                from fastapi.testclient import TestClient

            from .service import app
            self._client = TestClient(app)

    def post(self, endpoint: str, payload: dict) -> dict:
        try:
            resp = self._client.post(endpoint, json=payload)
        except httpx.HTTPError as exc:
            raise CliExit(EXIT_INPUT, f"cannot reach service: {exc}") from exc
        if resp.status_code == 400:
            raise CliExit(EXIT_INPUT, _detail(resp))
        if resp.status_code == 422:
            raise CliExit(EXIT_CONFIG, _detail(resp))
        if resp.status_code != 200:
            raise CliExit(EXIT_CONFIG,
                          f"service error {resp.status_code}: {resp.text}")
        return resp.json()


def _detail(resp) -> str:
    try:
        detail = resp.json().get("detail", resp.text)
    except ValueError:
        return resp.text
    if isinstance(detail, str):
        return detail
    return json.dumps(detail)


def _flag_options(kwargs) -> dict:
    names = {"input_": "input", "format_": "format", "lambda_": "lambda",
             "synth_width": "synth.width", "synth_height": "synth.height",
             "synth_frames": "synth.frames", "synth_noise": "synth.noise",
             "synth_background": "synth.background",
             "synth_seed": "synth.seed"}
    flags = {}
    for key, value in kwargs.items():
        if key in ("config_file", "server", "out", "strict", "layers",
                   "scales", "methods", "clip_format"):
            continue
        flags[names.get(key, key)] = value
    if kwargs.get("layers"):
        flags["synth.layer"] = list(kwargs["layers"])
    return flags


def _merged(kwargs) -> dict:
    file_options = {}
    if kwargs.get("config_file"):
        try:
            file_options = parse_config_file(kwargs["config_file"])
        except FileNotFoundError as exc:
            raise CliExit(EXIT_CONFIG, f"config file not found: {exc}")
    return merge_options(file_options, _flag_options(kwargs))


def _common_options(fn):
    opts = [
        click.option("--input", "input_", default=None,
                     help="Path to the input clip."),
        click.option("--format", "format_",
                     type=click.Choice(["y4m", "yuv420", "synth"]),
                     default=None, help="Input format."),
        click.option("--width", type=int, default=None,
                     help="Frame width for yuv420 input."),
        click.option("--height", type=int, default=None,
                     help="Frame height for yuv420 input."),
        click.option("--frames", type=int, default=None,
                     help="Use only the first N frames."),
        click.option("--qp", type=int, default=None,
                     help="Quantiser step driving lambda."),
        click.option("--th1", type=int, default=None,
                     help="Short-path init-cost threshold."),
        click.option("--th2", type=int, default=None,
                     help="Wide-search intermediate-cost threshold."),
        click.option("--class-eps", type=float, default=None,
                     help="Improvement margin for ground-truth classes."),
        click.option("--pac-th", type=int, default=None,
                     help="Predictor-accuracy Chebyshev threshold."),
        click.option("--lambda", "lambda_", type=float, default=None,
                     help="Override the qp-derived lambda."),
        click.option("--method",
                     type=click.Choice(["shs", "full_search", "ccme",
                                        "cost_only", "zero_sad"]),
                     default=None, help="Search/allocation method."),
        click.option("--scale", type=float, default=None,
                     help="Budget as percent of the calibrated reference."),
        click.option("--seed", type=int, default=None,
                     help="Seed for synthetic inputs."),
        click.option("--synth-width", type=int, default=None),
        click.option("--synth-height", type=int, default=None),
        click.option("--synth-frames", type=int, default=None),
        click.option("--synth-noise", type=int, default=None),
        click.option("--synth-background", type=int, default=None),
        click.option("--synth-seed", type=int, default=None),
        click.option("--layer", "layers", multiple=True,
                     help="Synthetic layer, texture:x,y,w,h:dx,dy[:k=v,..]."),
        click.option("--config", "config_file",
                     type=click.Path(), default=None,
                     help="Config file with key = value lines."),
        click.option("--server", default=None,
                     help="Remote service URL (default: in-process)."),
        click.option("--out", type=click.Path(), default=None,
                     help="Directory for CSV/JSON reports."),
    ]
    for opt in reversed(opts):
        fn = opt(fn)
    return fn


@click.group(name="mebudget")
@click.version_option(__version__)
def cli():
    """Computation-budgeted block motion estimation toolkit."""


@cli.command()
@_common_options
def calibrate(**kwargs):
    """Measure the unconstrained search-point reference."""
    merged = _merged(kwargs)
    config = assemble_run_config(merged)
    payload = {"config": config.model_dump(mode="json")}
    data = ServiceClient(kwargs["server"]).post("/calibrate", payload)
    report = CalibrationReport.model_validate(data)
    if kwargs["out"]:
        emit(report, kwargs["out"])
    click.echo(f"reference_sp_frame={fmt_value(report.reference_sp_frame)} "
               f"coded_frames={report.coded_frames} "
               f"mb_per_frame={report.mb_per_frame}")


@cli.command()
@click.option("--strict", is_flag=True, default=False,
              help="Exit 3 when any budgeted frame violates its budget.")
@_common_options
def run(strict, **kwargs):
    """Run one sequence and report per-frame budgets and costs."""
    merged = _merged(kwargs)
    strict = strict or merged.get("strict", False)
    merged.setdefault("mb_log", True)
    config = assemble_run_config(merged)
    payload = {"config": config.model_dump(mode="json")}
    data = ServiceClient(kwargs["server"]).post("/run", payload)
    report = SequenceReport.model_validate(data)
    if kwargs["out"]:
        emit(report, kwargs["out"])
    agg = report.aggregates
    click.echo(f"method={report.method} "
               f"budget_sp={fmt_value(report.budget_sp)} "
               f"frames={agg.coded_frames} "
               f"avg_actual_sp={fmt_value(agg.avg_actual_sp)} "
               f"avg_sp_mb={fmt_value(agg.avg_sp_mb)} "
               f"total_cost={agg.total_cost} "
               f"violations={agg.budget_violations} "
               f"sub_basic={agg.sub_basic_frames}")
    if strict and (agg.budget_violations or agg.sub_basic_frames):
        raise CliExit(EXIT_STRICT,
                      f"budget violated on {agg.budget_violations} frames, "
                      f"{agg.sub_basic_frames} below the basic layer")


@cli.command()
@click.option("--scales", default=None,
              help="Comma-separated budget percentages (must include 100).")
@click.option("--methods", default=None,
              help="Comma-separated budgeted methods to sweep.")
@_common_options
def sweep(**kwargs):
    """Run a budget-scale sweep for the budgeted methods."""
    merged = _merged(kwargs)
    if kwargs.get("scales") is not None:
        merged["scales"] = kwargs["scales"]
    if kwargs.get("methods") is not None:
        merged["methods"] = kwargs["methods"]
    scales = parse_scale_list(merged.get("scales", "100,60,40"))
    methods = parse_method_list(merged.get("methods",
                                           "ccme,cost_only,zero_sad"))
    config = assemble_run_config(merged)
    payload = {"config": config.model_dump(mode="json"),
               "scales": scales, "methods": methods}
    data = ServiceClient(kwargs["server"]).post("/sweep", payload)
    report = SweepReport.model_validate(data)
    if kwargs["out"]:
        emit(report, kwargs["out"])
    click.echo(f"reference_sp_frame={fmt_value(report.reference_sp_frame)}")
    for cell in report.cells:
        click.echo(f"method={cell.method} scale={fmt_value(cell.scale)} "
                   f"budget_sp={cell.budget_sp} "
                   f"avg_sp_mb={fmt_value(cell.avg_sp_mb)} "
                   f"total_cost={cell.total_cost} "
                   f"inflation_pct={fmt_value(cell.cost_inflation_pct)} "
                   f"violations={cell.budget_violations}")


@cli.command("classify-eval")
@_common_options
def classify_eval(**kwargs):
    """Score the predictive classifier against realised search gains."""
    merged = _merged(kwargs)
    config = assemble_run_config(merged)
    payload = {"config": config.model_dump(mode="json")}
    data = ServiceClient(kwargs["server"]).post("/detection", payload)
    report = DetectionReport.model_validate(data)
    if kwargs["out"]:
        emit(report, kwargs["out"])
    click.echo(f"lower_path_mbs={report.lower_path_mbs} "
               f"recall_class2={fmt_value(report.recall_class2)} "
               f"recall_class3={fmt_value(report.recall_class3)} "
               f"class1_exact={fmt_value(report.class1_exact)}")


@cli.command("class-dist")
@_common_options
def class_dist(**kwargs):
    """Ground-truth class shares at several improvement margins."""
    merged = _merged(kwargs)
    config = assemble_run_config(merged)
    payload = {"config": config.model_dump(mode="json")}
    data = ServiceClient(kwargs["server"]).post("/class-distribution",
                                                payload)
    report = ClassDistributionReport.model_validate(data)
    if kwargs["out"]:
        emit(report, kwargs["out"])
    for row in report.rows:
        click.echo(f"c={fmt_value(row.c_value)} "
                   f"class1={fmt_value(row.pct_class1)}% "
                   f"class2={fmt_value(row.pct_class2)}% "
                   f"class3={fmt_value(row.pct_class3)}%")


@cli.command()
@click.option("--clip-format", type=click.Choice(["y4m", "yuv420"]),
              default="y4m", help="Container for the materialised clip.")
@_common_options
def synth(**kwargs):
    """Materialise a synthetic clip to disk."""
    merged = _merged(kwargs)
    if not kwargs["out"]:
        raise CliExit(EXIT_CONFIG, "synth needs --out for the clip path")
    merged["format"] = "synth"
    config = assemble_run_config(merged)
    payload = {"synth": config.input.synth.model_dump(mode="json"),
               "path": kwargs["out"],
               "format": kwargs["clip_format"],
               "seed": config.seed}
    data = ServiceClient(kwargs["server"]).post("/synth", payload)
    report = SynthReport.model_validate(data)
    click.echo(f"path={report.path} frames={report.frames} "
               f"size={report.width}x{report.height} sha256={report.sha256}")


@cli.command()
@click.option("--host", default="127.0.0.1")
@click.option("--port", type=int, default=8000)
def serve(host, port):
    """Run the HTTP service."""
    import uvicorn

    from .service import app
    uvicorn.run(app, host=host, port=port)


def main(argv=None):
    try:
        cli.main(args=argv, standalone_mode=False)
    except CliExit as exc:
        click.echo(f"error: {exc.message}", err=True)
        sys.exit(exc.code)
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    except click.exceptions.Exit as exc:
        sys.exit(exc.exit_code)
    except click.Abort:
        sys.exit(130)
    except click.UsageError as exc:
        click.echo(f"error: {exc.format_message()}", err=True)
        sys.exit(EXIT_CONFIG)
    except click.ClickException as exc:
        exc.show()
        sys.exit(EXIT_CONFIG)
    sys.exit(0)


if __name__ == "__main__":
    main()
