"""Run configuration: pydantic models, config-file parsing, assembly.

The same RunConfig model validates CLI invocations and service
requests. Config files are flat `key = value` lines using the CLI flag
names; `synth.layer` may repeat, one line per layer. Explicit CLI flags
override file values.
"""

from __future__ import annotations

import math
from pathlib import Path
from typing import List, Literal, Optional

from pydantic import (BaseModel, ConfigDict, Field, ValidationError,
                      model_validator)

from .cost import CostParams
from .pipeline import BUDGETED_METHODS, METHODS
from .synth import LayerSpec, SynthSpec, synthesize
from .video_io import load_raw_yuv420, load_y4m


class ConfigError(ValueError):
    """Invalid or inconsistent run configuration."""


def plain_error(exc: Exception) -> str:
    """Flatten a pydantic ValidationError to its bare messages.

    str() on a ValidationError is a multi-line block with input dumps
    and a docs URL; error output should carry just the complaints.
    """
    if not isinstance(exc, ValidationError):
        return str(exc)
    parts = []
    for err in exc.errors():
        msg = err["msg"]
        if msg.startswith("Value error, "):
            msg = msg[len("Value error, "):]
        loc = ".".join(str(p) for p in err["loc"])
        parts.append(f"{loc}: {msg}" if loc else msg)
    return "; ".join(parts)


class LayerConfig(BaseModel):
    # extras forbidden so a mistyped layer keyword fails loudly
    model_config = ConfigDict(extra="forbid")

    texture: Literal["flat", "noise", "checker"]
    x: int
    y: int
    w: int = Field(gt=0)
    h: int = Field(gt=0)
    dx: int = 0
    dy: int = 0
    jitter: int = Field(default=0, ge=0)
    value: int = Field(default=128, ge=0, le=255)
    amplitude: int = Field(default=16, ge=0)
    cell: int = Field(default=4, gt=0)
    flicker: int = Field(default=0, ge=0)

    def to_spec(self) -> LayerSpec:
        return LayerSpec(texture=self.texture, region=(self.x, self.y,
                                                       self.w, self.h),
                         motion=(self.dx, self.dy), jitter=self.jitter,
                         value=self.value, amplitude=self.amplitude,
                         cell=self.cell, flicker=self.flicker)


class SynthConfig(BaseModel):
    width: int
    height: int
    frames: int = Field(ge=1)
    background: int = Field(default=128, ge=0, le=255)
    noise: int = Field(default=0, ge=0)
    seed: Optional[int] = None
    layers: List[LayerConfig] = []

    def to_spec(self, fallback_seed: int = 0) -> SynthSpec:
        seed = self.seed if self.seed is not None else fallback_seed
        return SynthSpec(width=self.width, height=self.height,
                         frames=self.frames,
                         layers=tuple(l.to_spec() for l in self.layers),
                         background=self.background,
                         noise_amplitude=self.noise, seed=seed)


class InputConfig(BaseModel):
    format: Literal["y4m", "yuv420", "synth"]
    path: Optional[str] = None
    width: Optional[int] = None
    height: Optional[int] = None
    synth: Optional[SynthConfig] = None

    @model_validator(mode="after")
    def _check(self):
        if self.format == "synth":
            if self.synth is None:
                raise ValueError("synth input needs a synth section")
        elif self.path is None:
            raise ValueError(f"{self.format} input needs a path")
        if self.format == "yuv420" and (self.width is None
                                        or self.height is None):
            raise ValueError("yuv420 input needs width and height")
        return self


class RunConfig(BaseModel):
    input: InputConfig
    frames: Optional[int] = Field(default=None, ge=2)
    qp: int = Field(default=28, ge=0, le=51)
    th1: int = Field(default=1000, ge=0)
    th2: int = Field(default=5000, ge=0)
    class_eps: float = Field(default=0.0, ge=0)
    pac_threshold: int = Field(default=1, ge=0)
    lambda_motion: Optional[float] = Field(default=None, ge=0)
    method: Literal["shs", "full_search", "ccme", "cost_only",
                    "zero_sad"] = "ccme"
    budget_scale: float = Field(default=100.0, gt=0, le=400)
    seed: int = 0
    include_mb_log: bool = False

    @model_validator(mode="after")
    def _check(self):
        if self.th1 > self.th2:
            raise ValueError(f"th1 ({self.th1}) must not exceed th2 "
                             f"({self.th2})")
        return self

    def cost_params(self) -> CostParams:
        return CostParams(qp=self.qp, th1=self.th1, th2=self.th2,
                          class_eps=self.class_eps,
                          pac_threshold=self.pac_threshold,
                          lambda_motion=self.lambda_motion)

    def load_frames(self):
        inp = self.input
        if inp.format == "synth":
            frames = synthesize(inp.synth.to_spec(self.seed)).frames
        elif inp.format == "y4m":
            frames = load_y4m(inp.path)
        else:
            frames = load_raw_yuv420(inp.path, inp.width, inp.height)
        if self.frames is not None:
            frames = frames[:self.frames]
        if len(frames) < 2:
            raise ConfigError("need at least two frames to code one")
        return frames

    def frame_budget(self, reference: float) -> int:
        return math.floor(self.budget_scale / 100.0 * reference)


class SweepConfig(BaseModel):
    run: RunConfig
    scales: List[float]
    methods: List[Literal["ccme", "cost_only", "zero_sad"]] = \
        list(BUDGETED_METHODS)

    @model_validator(mode="after")
    def _check(self):
        if not self.scales:
            raise ValueError("sweep needs at least one scale")
        for s in self.scales:
            if not 0 < s <= 400:
                raise ValueError(f"budget scale {s} outside (0, 400]")
        if 100.0 not in self.scales:
            raise ValueError("sweep scales must include 100")
        self.scales = sorted(set(self.scales), reverse=True)
        if not self.methods:
            raise ValueError("sweep needs at least one method")
        return self


def parse_layer_string(text: str) -> LayerConfig:
    """Parse `texture:x,y,w,h:dx,dy[:key=value,...]`."""
    parts = text.split(":")
    if len(parts) < 2 or len(parts) > 4:
        raise ConfigError(f"bad layer spec {text!r}")
    try:
        x, y, w, h = (int(v) for v in parts[1].split(","))
        fields = {"texture": parts[0].strip(), "x": x, "y": y, "w": w, "h": h}
        if len(parts) > 2 and parts[2].strip():
            dx, dy = (int(v) for v in parts[2].split(","))
            fields.update(dx=dx, dy=dy)
        if len(parts) > 3 and parts[3].strip():
            for kv in parts[3].split(","):
                key, _, val = kv.partition("=")
                fields[key.strip()] = int(val)
        return LayerConfig(**fields)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"bad layer spec {text!r}: "
                          f"{plain_error(exc)}") from exc


def parse_config_file(path) -> dict:
    """Flat `key = value` file; `synth.layer` may repeat."""
    out: dict = {}
    text = Path(path).read_text()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, value = key.strip(), value.strip()
        if key == "synth.layer":
            out.setdefault(key, []).append(value)
        else:
            out[key] = value
    return out


_BOOL_WORDS = {"1": True, "true": True, "yes": True, "on": True,
               "0": False, "false": False, "no": False, "off": False}


def _to_bool(value) -> bool:
    if isinstance(value, bool):
        return value
    word = str(value).strip().lower()
    if word not in _BOOL_WORDS:
        raise ConfigError(f"expected a boolean, got {value!r}")
    return _BOOL_WORDS[word]


_INT_KEYS = ("width", "height", "frames", "qp", "th1", "th2", "pac_th",
             "seed", "synth.width", "synth.height", "synth.frames",
             "synth.background", "synth.noise", "synth.seed")
_FLOAT_KEYS = ("class_eps", "scale", "lambda")
_KNOWN_KEYS = set(_INT_KEYS) | set(_FLOAT_KEYS) | {
    "input", "format", "method", "strict", "out", "server", "scales",
    "methods", "synth.layer", "mb_log"}


def merge_options(file_options: dict, flag_options: dict) -> dict:
    """Typed merge of config-file entries and CLI flags; flags win."""
    merged: dict = {}
    for key, value in file_options.items():
        if key not in _KNOWN_KEYS:
            raise ConfigError(f"unknown config key {key!r}")
        if key in _INT_KEYS:
            try:
                merged[key] = int(value)
            except ValueError as exc:
                raise ConfigError(f"{key}: expected an integer, "
                                  f"got {value!r}") from exc
        elif key in _FLOAT_KEYS:
            try:
                merged[key] = float(value)
            except ValueError as exc:
                raise ConfigError(f"{key}: expected a number, "
                                  f"got {value!r}") from exc
        elif key in ("strict", "mb_log"):
            merged[key] = _to_bool(value)
        else:
            merged[key] = value
    for key, value in flag_options.items():
        if value is not None:
            merged[key] = value
    return merged


def assemble_run_config(options: dict) -> RunConfig:
    """Build a RunConfig from merged CLI-style options."""
    fmt = options.get("format")
    if fmt is None:
        fmt = "synth" if "synth.width" in options else "y4m"
    synth = None
    if fmt == "synth":
        try:
            layer_values = options.get("synth.layer", [])
            layers = [v if isinstance(v, LayerConfig) else
                      parse_layer_string(v) for v in layer_values]
            synth = SynthConfig(
                width=options.get("synth.width"),
                height=options.get("synth.height"),
                frames=options.get("synth.frames"),
                background=options.get("synth.background", 128),
                noise=options.get("synth.noise", 0),
                seed=options.get("synth.seed"),
                layers=layers)
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"bad synth section: {plain_error(exc)}") \
                from exc
    fields = {"input": {"format": fmt, "path": options.get("input"),
                        "width": options.get("width"),
                        "height": options.get("height"),
                        "synth": synth}}
    for src, dst in (("frames", "frames"), ("qp", "qp"), ("th1", "th1"),
                     ("th2", "th2"), ("class_eps", "class_eps"),
                     ("pac_th", "pac_threshold"), ("lambda", "lambda_motion"),
                     ("method", "method"), ("scale", "budget_scale"),
                     ("seed", "seed"), ("mb_log", "include_mb_log")):
        if options.get(src) is not None:
            fields[dst] = options[src]
    try:
        return RunConfig(**fields)
    except ValueError as exc:
        raise ConfigError(plain_error(exc)) from exc


def parse_scale_list(text: str) -> List[float]:
    try:
        return [float(v) for v in str(text).split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad scale list {text!r}") from exc


def parse_method_list(text: str) -> List[str]:
    methods = [v.strip() for v in str(text).split(",") if v.strip()]
    for m in methods:
        if m not in METHODS:
            raise ConfigError(f"unknown method {m!r}")
        if m not in BUDGETED_METHODS:
            raise ConfigError(f"method {m!r} is unbudgeted and cannot sweep")
    return methods
