"""Run-description parsing and emission.

A run is described by one JSON document with the top-level keys
``medium, wall1, wall3, plate, d1, d3, engine, task, quadrature, sweep,
output``. Lengths are strings with a unit suffix (``"200nm"``, ``"1um"``,
``"1e-6m"``) or ``"inf"`` for a gap without a far wall. Materials are tagged
records, e.g. ``{"type": "constant", "eps": 2, "mu": 1}``.
"""

from __future__ import annotations

import json
import math
import re
from decimal import Decimal, InvalidOperation
from dataclasses import dataclass, field, replace
from typing import Any, Optional

from .geometry import CavitySetup, Gap, Layer, LayerStack
from .materials import (VACUUM, PERFECT_MIRROR, Constant, DrudeLorentz, MaterialModel,
                        OscillatorTerm, PerfectMirror, Vacuum)
from .minkowski import Engine
from .quadrature import Mapping, QuadratureSpec

TOP_KEYS = ("medium", "wall1", "wall3", "plate", "d1", "d3", "engine", "task",
            "quadrature", "sweep", "output")
TASKS = ("force", "stress-profile", "ratio", "closed-form", "oracle", "validate", "sweep")
ENGINES = ("lorentz", "minkowski", "both")
CAVITY_TASKS = ("force", "stress-profile", "ratio", "sweep")

DEFAULT_QUADRATURE = QuadratureSpec(rel_tol=1e-8)

_UNITS = {"nm": Decimal("1e-9"), "um": Decimal("1e-6"), "m": Decimal(1)}
_LENGTH = re.compile(r"^\s*([-+0-9.eE]+)\s*(nm|um|m)\s*$")


class ConfigError(ValueError):
    """Schema violation; ``path`` names the offending key."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


@dataclass(frozen=True)
class Sweep:
    variable: str
    values: tuple


@dataclass(frozen=True)
class RunConfig:
    task: str
    engine: str = "both"
    medium: Optional[MaterialModel] = None
    wall1: Optional[LayerStack] = None
    wall3: Optional[LayerStack] = None
    plate: Optional[tuple] = None
    d1: Optional[float] = None
    d3: Optional[float] = None
    quadrature: QuadratureSpec = DEFAULT_QUADRATURE
    sweep: Optional[Sweep] = None
    profile_gap: Gap = Gap.GAP3
    profile_points: int = 9
    output_format: str = "csv"
    output_path: Optional[str] = None

    @property
    def cavity(self) -> CavitySetup:
        return CavitySetup(self.wall1, self.d1, self.plate, self.d3, self.wall3, self.medium)

    def with_gap(self, variable: str, value: float) -> "RunConfig":
        return replace(self, **{variable: value})


def parse_length(value, path: str) -> float:
    if not isinstance(value, str):
        raise ConfigError(path, "lengths are strings with a unit suffix (nm, um, m) or 'inf'")
    if value.strip() == "inf":
        return math.inf
    m = _LENGTH.match(value)
    if not m:
        raise ConfigError(path, f"cannot read length {value!r}")
    try:
        # scale in decimal so "500nm" is exactly 5e-07
        out = float(Decimal(m.group(1)) * _UNITS[m.group(2)])
    except InvalidOperation:
        raise ConfigError(path, f"cannot read length {value!r}") from None
    if not (out > 0):
        raise ConfigError(path, "length must be > 0")
    return out


def format_length(value: float) -> str:
    return "inf" if math.isinf(value) else f"{value!r}m"


def _expect(obj, kind, path):
    if not isinstance(obj, kind):
        raise ConfigError(path, f"expected {kind.__name__}, got {type(obj).__name__}")
    return obj


def _number(obj, path):
    if isinstance(obj, bool) or not isinstance(obj, (int, float)):
        raise ConfigError(path, "expected a number")
    return float(obj)


def _only(obj, allowed, path):
    for key in obj:
        if key not in allowed:
            raise ConfigError(f"{path}.{key}", "unknown key")


def _term(obj, path):
    _expect(obj, dict, path)
    _only(obj, ("plasma_strength", "plasma_frequency", "resonance", "damping"), path)
    if "plasma_strength" in obj:
        strength = _number(obj["plasma_strength"], f"{path}.plasma_strength")
    elif "plasma_frequency" in obj:
        strength = _number(obj["plasma_frequency"], f"{path}.plasma_frequency") ** 2
    else:
        raise ConfigError(path, "missing plasma_strength")
    try:
        return OscillatorTerm(strength,
                              _number(obj.get("resonance", 0.0), f"{path}.resonance"),
                              _number(obj.get("damping", 0.0), f"{path}.damping"))
    except ValueError as exc:
        raise ConfigError(path, str(exc)) from None


def parse_material(obj, path: str) -> MaterialModel:
    _expect(obj, dict, path)
    kind = obj.get("type")
    if kind == "vacuum":
        _only(obj, ("type",), path)
        return VACUUM
    if kind == "perfect_mirror":
        _only(obj, ("type",), path)
        return PERFECT_MIRROR
    if kind == "constant":
        _only(obj, ("type", "eps", "mu"), path)
        if "eps" not in obj:
            raise ConfigError(f"{path}.eps", "missing field")
        try:
            return Constant(_number(obj["eps"], f"{path}.eps"),
                            _number(obj.get("mu", 1.0), f"{path}.mu"))
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(path, str(exc)) from None
    if kind == "drude_lorentz":
        _only(obj, ("type", "electric", "magnetic"), path)
        terms = {}
        for key in ("electric", "magnetic"):
            items = _expect(obj.get(key, []), list, f"{path}.{key}")
            terms[key] = tuple(_term(t, f"{path}.{key}[{i}]") for i, t in enumerate(items))
        return DrudeLorentz(terms["electric"], terms["magnetic"])
    raise ConfigError(f"{path}.type", f"unknown material type {kind!r}")


def _gap_material(obj, path):
    material = parse_material(obj, path)
    if isinstance(material, PerfectMirror):
        raise ConfigError(path, "a perfect mirror cannot fill a gap or a layer")
    return material


def _layer(obj, path, allow_mirror=False):
    _expect(obj, dict, path)
    _only(obj, ("thickness", "material"), path)
    for key in ("thickness", "material"):
        if key not in obj:
            raise ConfigError(f"{path}.{key}", "missing field")
    thickness = parse_length(obj["thickness"], f"{path}.thickness")
    if math.isinf(thickness):
        raise ConfigError(f"{path}.thickness", "layer thickness must be finite")
    if allow_mirror:
        return Layer(thickness, parse_material(obj["material"], f"{path}.material"))
    return Layer(thickness, _gap_material(obj["material"], f"{path}.material"))


def _stack(obj, path):
    _expect(obj, dict, path)
    if "type" in obj:
        return LayerStack.halfspace(parse_material(obj, path))
    _only(obj, ("layers", "termination"), path)
    if "termination" not in obj:
        raise ConfigError(f"{path}.termination", "missing field")
    layers = _expect(obj.get("layers", []), list, f"{path}.layers")
    return LayerStack(tuple(_layer(l, f"{path}.layers[{i}]") for i, l in enumerate(layers)),
                      parse_material(obj["termination"], f"{path}.termination"))


def _plate(obj, path):
    if isinstance(obj, dict):
        obj = [obj]
    layers = _expect(obj, list, path)
    if not layers:
        raise ConfigError(path, "the plate needs at least one layer")
    return tuple(_layer(l, f"{path}[{i}]", allow_mirror=True) for i, l in enumerate(layers))


def _quadrature(obj, path):
    _expect(obj, dict, path)
    _only(obj, ("rel_tol", "abs_tol", "max_nodes", "mapping"), path)
    d = DEFAULT_QUADRATURE
    try:
        mapping = Mapping(obj.get("mapping", d.mapping.value))
    except ValueError:
        raise ConfigError(f"{path}.mapping", f"unknown mapping {obj.get('mapping')!r}") from None
    max_nodes = obj.get("max_nodes", d.max_nodes_per_axis)
    if isinstance(max_nodes, bool) or not isinstance(max_nodes, int) or max_nodes < 16:
        raise ConfigError(f"{path}.max_nodes", "expected an integer >= 16")
    rel_tol = _number(obj.get("rel_tol", d.rel_tol), f"{path}.rel_tol")
    if not rel_tol > 0:
        raise ConfigError(f"{path}.rel_tol", "must be > 0")
    abs_tol = _number(obj.get("abs_tol", d.abs_tol), f"{path}.abs_tol")
    if not abs_tol >= 0:
        raise ConfigError(f"{path}.abs_tol", "must be >= 0")
    return QuadratureSpec(rel_tol, abs_tol, max_nodes, mapping)


def parse_config(text: str) -> RunConfig:
    """Validated RunConfig from JSON text; raises ConfigError with the key path."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("$", f"not valid JSON: {exc}") from None
    return config_from_dict(raw)


def config_from_dict(raw: dict) -> RunConfig:
    _expect(raw, dict, "$")
    _only(raw, TOP_KEYS, "$")
    if "task" not in raw:
        raise ConfigError("task", "missing field")
    task_obj = raw["task"]
    options = {}
    if isinstance(task_obj, dict):
        _only(task_obj, ("name", "gap", "points"), "task")
        options = task_obj
        task = task_obj.get("name")
    else:
        task = task_obj
    if task not in TASKS:
        raise ConfigError("task", f"unknown task {task!r}; expected one of {', '.join(TASKS)}")
    kwargs: dict[str, Any] = {"task": task}
    if "gap" in options:
        try:
            kwargs["profile_gap"] = Gap(options["gap"])
        except ValueError:
            raise ConfigError("task.gap", "expected 'gap1' or 'gap3'") from None
    if "points" in options:
        points = options["points"]
        if isinstance(points, bool) or not isinstance(points, int) or points < 2:
            raise ConfigError("task.points", "expected an integer >= 2")
        kwargs["profile_points"] = points

    engine = raw.get("engine", "both")
    if engine not in ENGINES:
        raise ConfigError("engine", f"unknown engine {engine!r}")
    kwargs["engine"] = engine

    required = {"force": TOP_KEYS[:6], "stress-profile": TOP_KEYS[:6], "ratio": TOP_KEYS[:6],
                "sweep": TOP_KEYS[:6], "closed-form": ("medium", "d1", "d3")}.get(task, ())
    for key in required:
        if key not in raw:
            raise ConfigError(key, f"missing field (required by task {task!r})")
    if "medium" in raw:
        kwargs["medium"] = _gap_material(raw["medium"], "medium")
    for key in ("wall1", "wall3"):
        if key in raw:
            kwargs[key] = _stack(raw[key], key)
    if "plate" in raw:
        kwargs["plate"] = _plate(raw["plate"], "plate")
    for key in ("d1", "d3"):
        if key in raw:
            kwargs[key] = parse_length(raw[key], key)
    if "d1" in kwargs and "d3" in kwargs and math.isinf(kwargs["d1"]) and math.isinf(kwargs["d3"]):
        raise ConfigError("d1", "d1 and d3 cannot both be inf")
    if "quadrature" in raw:
        kwargs["quadrature"] = _quadrature(raw["quadrature"], "quadrature")

    if (task == "sweep") != ("sweep" in raw):
        raise ConfigError("sweep", "a sweep block is required for task 'sweep' and only then")
    if "sweep" in raw:
        sw = _expect(raw["sweep"], dict, "sweep")
        _only(sw, ("variable", "values"), "sweep")
        if sw.get("variable") not in ("d1", "d3"):
            raise ConfigError("sweep.variable", "expected 'd1' or 'd3'")
        values = _expect(sw.get("values"), list, "sweep.values")
        if not values:
            raise ConfigError("sweep.values", "needs at least one value")
        kwargs["sweep"] = Sweep(sw["variable"], tuple(
            parse_length(v, f"sweep.values[{i}]") for i, v in enumerate(values)))

    if "output" in raw:
        out = _expect(raw["output"], dict, "output")
        _only(out, ("format", "path"), "output")
        fmt = out.get("format", "csv")
        if fmt not in ("csv", "json"):
            raise ConfigError("output.format", "expected 'csv' or 'json'")
        kwargs["output_format"] = fmt
        if out.get("path") is not None:
            kwargs["output_path"] = _expect(out["path"], str, "output.path")
    cfg = RunConfig(**kwargs)
    if task in CAVITY_TASKS:
        try:
            cfg.cavity
        except ValueError as exc:
            raise ConfigError("$", str(exc)) from None
    return cfg


def material_to_dict(m: MaterialModel) -> dict:
    if isinstance(m, Vacuum):
        return {"type": "vacuum"}
    if isinstance(m, PerfectMirror):
        return {"type": "perfect_mirror"}
    if isinstance(m, Constant):
        return {"type": "constant", "eps": m.eps_static, "mu": m.mu_static}
    terms = lambda ts: [{"plasma_strength": t.plasma_strength, "resonance": t.resonance,
                         "damping": t.damping} for t in ts]
    return {"type": "drude_lorentz", "electric": terms(m.electric_terms),
            "magnetic": terms(m.magnetic_terms)}


def _layer_to_dict(layer):
    return {"thickness": format_length(layer.thickness), "material": material_to_dict(layer.material)}


def config_to_dict(cfg: RunConfig) -> dict:
    out: dict[str, Any] = {}
    if cfg.medium is not None:
        out["medium"] = material_to_dict(cfg.medium)
    for key in ("wall1", "wall3"):
        stack = getattr(cfg, key)
        if stack is not None:
            out[key] = {"layers": [_layer_to_dict(l) for l in stack.layers],
                        "termination": material_to_dict(stack.termination)}
    if cfg.plate is not None:
        out["plate"] = [_layer_to_dict(l) for l in cfg.plate]
    for key in ("d1", "d3"):
        if getattr(cfg, key) is not None:
            out[key] = format_length(getattr(cfg, key))
    out["engine"] = cfg.engine
    out["task"] = {"name": cfg.task, "gap": cfg.profile_gap.value, "points": cfg.profile_points}
    q = cfg.quadrature
    out["quadrature"] = {"rel_tol": q.rel_tol, "abs_tol": q.abs_tol,
                         "max_nodes": int(q.max_nodes_per_axis), "mapping": q.mapping.value}
    if cfg.sweep is not None:
        out["sweep"] = {"variable": cfg.sweep.variable,
                        "values": [format_length(v) for v in cfg.sweep.values]}
    output = {"format": cfg.output_format}
    if cfg.output_path is not None:
        output["path"] = cfg.output_path
    out["output"] = output
    return out


def dump_config(cfg: RunConfig) -> str:
    return json.dumps(config_to_dict(cfg), indent=2, sort_keys=True)
