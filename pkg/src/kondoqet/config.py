"""JSON run configuration.

A config is a single JSON object.  Model keys sit at the top level; sweep
and output keys alongside them.  Every key is optional::

    {
      "N": 8, "J": 0.5, "Delta": 1.0, "Jk": 0.2, "B": 0.4,
      "coupled_site": 2, "n_A": 4, "n_B": 7,
      "sigma_A_axis": "X", "sigma_B_axis": "Y",
      "include_impurity_bulk_bond": false,
      "axis1": {"name": "Delta", "lo": -2.0, "hi": 2.0, "steps": 41},
      "axis2": {"name": "B", "lo": 0.0, "hi": 1.5, "steps": 41},
      "outputs": ["s_lr", "e_teleported"],
      "emit": ["csv"],
      "workers": 1,
      "cut": null,
      "minimal_grid": {"lo": 0.1, "hi": 10.0, "steps": 10},
      "out": null,
      "svg_prefix": null
    }

Unknown keys are rejected.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, fields
from pathlib import Path

from kondoqet.errors import KondoQetError, StructuralError
from kondoqet.model import ModelParams
from kondoqet.sweep import Axis, SweepConfig

MODEL_KEYS = tuple(f.name for f in fields(ModelParams))
AXIS_KEYS = ("name", "lo", "hi", "steps")


class ConfigError(KondoQetError, ValueError):
    """Config file unreadable, malformed, or failing validation."""


@dataclass(frozen=True)
class MinimalGrid:
    lo: float = 0.1
    hi: float = 10.0
    steps: int = 10

    def values(self) -> list[float]:
        if self.steps == 1:
            return [self.lo]
        a, b = math.log(self.lo), math.log(self.hi)
        return [math.exp(a + (b - a) * i / (self.steps - 1)) for i in range(self.steps)]


@dataclass(frozen=True)
class RunConfig:
    model: ModelParams = field(default_factory=ModelParams)
    sweep: SweepConfig = field(default_factory=SweepConfig)
    cut: int | None = None
    minimal_grid: MinimalGrid = field(default_factory=MinimalGrid)
    out: str | None = None
    svg_prefix: str | None = None

    def to_dict(self) -> dict:
        d = self.model.to_dict()
        d["axis1"] = _axis_dict(self.sweep.axis1)
        d["axis2"] = _axis_dict(self.sweep.axis2) if self.sweep.axis2 else None
        d["outputs"] = list(self.sweep.outputs)
        d["emit"] = list(self.sweep.emit)
        d["workers"] = self.sweep.workers
        d["cut"] = self.cut
        d["minimal_grid"] = {"lo": self.minimal_grid.lo, "hi": self.minimal_grid.hi, "steps": self.minimal_grid.steps}
        d["out"] = self.out
        d["svg_prefix"] = self.svg_prefix
        return d


TOP_KEYS = MODEL_KEYS + ("axis1", "axis2", "outputs", "emit", "workers", "cut", "minimal_grid", "out", "svg_prefix")


def _axis_dict(axis: Axis) -> dict:
    return {"name": axis.name, "lo": axis.lo, "hi": axis.hi, "steps": axis.steps}


def _number(key, value, integer=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{key}: expected a number, got {value!r}")
    if integer and not isinstance(value, int):
        raise ConfigError(f"{key}: expected an integer, got {value!r}")
    if not math.isfinite(value):
        raise ConfigError(f"{key}: must be finite")
    return value


def _axis(key, raw) -> Axis:
    if not isinstance(raw, dict):
        raise ConfigError(f"{key}: expected an object with keys {AXIS_KEYS}")
    unknown = set(raw) - set(AXIS_KEYS)
    if unknown:
        raise ConfigError(f"{key}: unknown key(s) {sorted(unknown)}")
    try:
        return Axis(
            str(raw.get("name", "")),
            float(_number(f"{key}.lo", raw.get("lo", 0.0))),
            float(_number(f"{key}.hi", raw.get("hi", 1.0))),
            _number(f"{key}.steps", raw.get("steps", 41), integer=True),
        )
    except StructuralError as exc:
        raise ConfigError(f"{key}: {exc}") from exc


def config_from_dict(doc: dict, require_protocol: bool = True) -> RunConfig:
    """Validate a parsed document and fill defaults."""
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    unknown = sorted(set(doc) - set(TOP_KEYS))
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(unknown)}")

    model_kw = {}
    for key in MODEL_KEYS:
        if key not in doc:
            continue
        value = doc[key]
        if key in ("N", "coupled_site", "n_A", "n_B"):
            model_kw[key] = _number(key, value, integer=True)
        elif key in ("sigma_A_axis", "sigma_B_axis"):
            if not isinstance(value, str):
                raise ConfigError(f"{key}: expected a string")
            model_kw[key] = value
        elif key == "include_impurity_bulk_bond":
            if not isinstance(value, bool):
                raise ConfigError(f"{key}: expected true or false")
            model_kw[key] = value
        else:
            model_kw[key] = float(_number(key, value))
    try:
        model = ModelParams(**model_kw)
        if require_protocol:
            model.check_protocol()
    except StructuralError as exc:
        raise ConfigError(str(exc)) from exc

    defaults = SweepConfig()
    axis1 = _axis("axis1", doc["axis1"]) if "axis1" in doc else defaults.axis1
    if "axis2" in doc:
        axis2 = None if doc["axis2"] is None else _axis("axis2", doc["axis2"])
    else:
        axis2 = defaults.axis2
    for key in ("outputs", "emit"):
        if key in doc and not (isinstance(doc[key], list) and all(isinstance(v, str) for v in doc[key])):
            raise ConfigError(f"{key}: expected a list of strings")
    try:
        sweep = SweepConfig(
            base=model,
            axis1=axis1,
            axis2=axis2,
            outputs=tuple(doc.get("outputs", defaults.outputs)),
            emit=tuple(doc.get("emit", defaults.emit)),
            workers=_number("workers", doc.get("workers", 1), integer=True),
        )
    except StructuralError as exc:
        raise ConfigError(str(exc)) from exc

    cut = doc.get("cut")
    if cut is not None:
        cut = _number("cut", cut, integer=True)
        if not 1 <= cut <= model.N - 1:
            raise ConfigError(f"cut: {cut} outside [1, N-1={model.N - 1}]")

    raw_grid = doc.get("minimal_grid") or {}
    if not isinstance(raw_grid, dict) or set(raw_grid) - {"lo", "hi", "steps"}:
        raise ConfigError("minimal_grid: expected an object with keys lo, hi, steps")
    grid = MinimalGrid(
        float(_number("minimal_grid.lo", raw_grid.get("lo", 0.1))),
        float(_number("minimal_grid.hi", raw_grid.get("hi", 10.0))),
        _number("minimal_grid.steps", raw_grid.get("steps", 10), integer=True),
    )
    if not (0 < grid.lo <= grid.hi) or grid.steps < 1:
        raise ConfigError("minimal_grid: need 0 < lo <= hi and steps >= 1")

    for key in ("out", "svg_prefix"):
        if doc.get(key) is not None and not isinstance(doc[key], str):
            raise ConfigError(f"{key}: expected a path string")
    return RunConfig(model, sweep, cut, grid, doc.get("out"), doc.get("svg_prefix"))


def parse_document(text: str) -> dict:
    if not text.strip():
        return {}
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    return doc


def read_document(path) -> dict:
    """Raw (unvalidated) config document from ``path``."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror or exc}") from exc
    try:
        return parse_document(text)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def parse_config(text: str, require_protocol: bool = True) -> RunConfig:
    return config_from_dict(parse_document(text), require_protocol=require_protocol)


def load_config(path, require_protocol: bool = True) -> RunConfig:
    doc = read_document(path)
    try:
        return config_from_dict(doc, require_protocol=require_protocol)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def dump_config(config: RunConfig) -> str:
    return json.dumps(config.to_dict(), indent=2) + "\n"
