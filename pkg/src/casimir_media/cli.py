"""Command-line front end: one config file per run, CSV (or JSON) out.

Exit codes: 0 success, 2 parse error, 3 non-convergence, 4 failed validation.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import replace

import numpy as np

from . import closed_forms as cf
from .config import ConfigError, RunConfig, config_to_dict, parse_config
from .geometry import CavitySetup, Gap, Layer, LayerStack, gap_of
from .lorentz import plate_force_L, stress_profile
from .materials import PERFECT_MIRROR, VACUUM, Constant, static_values
from .minkowski import Engine, gap_attraction_M, plate_force_M
from .modesum import ExtrapolationUnstable, OracleSpec, factor_scan
from .quadrature import NonConvergence, QuadratureSpec

EXIT_OK, EXIT_PARSE, EXIT_NONCONVERGENCE, EXIT_VALIDATION = 0, 2, 3, 4

HEADERS = {
    "force": ("engine", "d1_m", "d3_m", "force_Pa", "err_Pa"),
    "sweep": ("engine", "d1_m", "d3_m", "force_Pa", "err_Pa"),
    "stress-profile": ("z_m", "stress_Pa", "err_Pa"),
    "ratio": ("d3_m", "F_lorentz_Pa", "F_minkowski_Pa", "ratio", "closed_form_ratio"),
    "closed-form": ("engine", "d1_m", "d3_m", "eps", "mu", "factor", "force_Pa"),
    "oracle": ("eps", "mu", "measured_lorentz", "display_lorentz",
               "measured_minkowski", "display_minkowski"),
    "validate": ("check_name", "expected", "measured", "tolerance", "pass"),
}

ORACLE_MEDIA = ((1.0, 1.0), (1.5, 1.0), (2.0, 1.0), (4.0, 1.0), (1.0, 2.0), (2.0, 2.0))


class ValidationFailed(RuntimeError):
    pass


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        # repr is the shortest round-trip form (at most 17 significant digits)
        return repr(value)
    return str(value)


def _engines(cfg: RunConfig):
    if cfg.engine == "both":
        return (Engine.LORENTZ, Engine.MINKOWSKI)
    return (Engine(cfg.engine),)


def _force(cavity: CavitySetup, engine: Engine, spec: QuadratureSpec):
    fn = plate_force_L if engine is Engine.LORENTZ else plate_force_M
    return fn(cavity, spec)


def _force_rows(cfg: RunConfig, cavity: CavitySetup):
    rows = []
    for engine in _engines(cfg):
        res = _force(cavity, engine, cfg.quadrature)
        rows.append((engine.value, cavity.d1, cavity.d3, res.value, res.err_estimate))
    return rows


def _static_medium(cfg: RunConfig) -> cf.StaticMedium:
    eps, mu = static_values(cfg.medium)
    return cf.StaticMedium(eps, mu)


def task_force(cfg):
    return _force_rows(cfg, cfg.cavity)


def task_sweep(cfg):
    rows = []
    for value in cfg.sweep.values:
        rows.extend(_force_rows(cfg, cfg.with_gap(cfg.sweep.variable, value).cavity))
    return rows


def task_stress_profile(cfg):
    gap = gap_of(cfg.cavity, cfg.profile_gap)
    prof = stress_profile(gap, cfg.profile_points, cfg.quadrature, cfg.profile_gap)
    return list(zip(prof.positions, prof.values, prof.errors))


def task_ratio(cfg):
    cavity = cfg.cavity
    fl = plate_force_L(cavity, cfg.quadrature).value
    fm = plate_force_M(cavity, cfg.quadrature).value
    m = _static_medium(cfg)
    closed = cf.lorentz_factor(m) / cf.minkowski_factor(m)
    ratio = fl / fm if fm != 0 else math.nan
    return [(cavity.d3, fl, fm, ratio, closed)]


def task_closed_form(cfg):
    m = _static_medium(cfg)
    rows = []
    for engine in _engines(cfg):
        factor = cf.lorentz_factor(m) if engine is Engine.LORENTZ else cf.minkowski_factor(m)
        rows.append((engine.value, cfg.d1, cfg.d3, m.eps, m.mu, factor,
                     cf.plate_force_closed(m, cfg.d1, cfg.d3, engine)))
    return rows


def task_oracle(cfg):
    d = cfg.d3 if cfg.d3 is not None and math.isfinite(cfg.d3) else 1e-6
    media = [cf.StaticMedium(e, mu) for e, mu in ORACLE_MEDIA]
    return [(r.eps, r.mu, r.measured_lorentz, r.display_lorentz,
             r.measured_minkowski, r.display_minkowski)
            for r in factor_scan(media, OracleSpec(cf.StaticMedium(), d))]


def ideal_cavity(medium, d1, d3) -> CavitySetup:
    """Perfect-mirror walls around an ideally conducting 100 nm plate."""
    mirror = LayerStack.halfspace(PERFECT_MIRROR)
    return CavitySetup(mirror, d1, (Layer(100e-9, PERFECT_MIRROR),), d3, mirror, medium)


def validation_checks(spec: QuadratureSpec):
    """(name, expected, measured, tolerance, relative?) for the built-in bundle."""
    checks = []
    d = 1e-6
    ideal = cf.casimir_ideal(d)
    vac = ideal_cavity(VACUUM, math.inf, d)
    for engine in (Engine.MINKOWSKI, Engine.LORENTZ):
        res = _force(vac, engine, spec)
        checks.append((f"vacuum_anchor_{engine.value}", ideal, res.value, 1e-5, True))
    ds = np.array([0.5e-6, 1e-6, 2e-6])
    forces = [plate_force_M(ideal_cavity(VACUUM, math.inf, x), spec).value for x in ds]
    slope = float(np.polyfit(np.log(ds), np.log(forces), 1)[0])
    checks.append(("d4_scaling_exponent", -4.0, slope, 0.01, False))
    sym = plate_force_L(ideal_cavity(Constant(2.0), d, d), spec)
    checks.append(("symmetric_cavity_zero", 0.0, sym.value, max(2 * sym.err_estimate, 1e-300),
                   False))
    medium = Constant(2.0)
    gap = ideal_cavity(medium, math.inf, d)
    fl = plate_force_L(gap, spec).value
    fm = plate_force_M(gap, spec).value
    m2 = cf.StaticMedium(2.0, 1.0)
    checks.append(("lorentz_factor_eps2", cf.lorentz_factor(m2), fl / ideal, 1e-3, True))
    checks.append(("minkowski_factor_eps2", cf.minkowski_factor(m2), fm / ideal, 1e-3, True))
    checks.append(("ratio_eps2", 2 / 3 + 1 / 6, fl / fm, 1e-3, True))
    rows = factor_scan([cf.StaticMedium(), m2], OracleSpec(cf.StaticMedium(), d))
    checks.append(("oracle_vacuum", 1.0, rows[0].measured_lorentz, 5e-3, True))
    checks.append(("oracle_lorentz_eps2", cf.lorentz_factor(m2), rows[1].measured_lorentz,
                   5e-3, True))
    checks.append(("oracle_minkowski_eps2", cf.minkowski_factor(m2), rows[1].measured_minkowski,
                   5e-3, True))
    return checks


def task_validate(cfg):
    rows = []
    failed = False
    for name, expected, measured, tol, relative in validation_checks(cfg.quadrature):
        dev = abs(measured - expected)
        ok = dev <= tol * abs(expected) if relative else dev <= tol
        failed |= not ok
        rows.append((name, expected, measured, tol, ok))
    return rows, failed


TASK_FUNCS = {
    "force": task_force, "sweep": task_sweep, "stress-profile": task_stress_profile,
    "ratio": task_ratio, "closed-form": task_closed_form, "oracle": task_oracle,
}


def render(cfg: RunConfig, rows) -> str:
    header = HEADERS[cfg.task]
    if cfg.output_format == "json":
        records = [dict(zip(header, row)) for row in rows]
        clean = [{k: (None if isinstance(v, float) and not math.isfinite(v) else v)
                  for k, v in r.items()} for r in records]
        return json.dumps({"task": cfg.task, "config": config_to_dict(cfg), "rows": clean},
                          indent=2, sort_keys=True) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def run(cfg: RunConfig) -> tuple[int, str]:
    """Execute a parsed config; returns (exit status, emitted text)."""
    status = EXIT_OK
    try:
        if cfg.task == "validate":
            rows, failed = task_validate(cfg)
            status = EXIT_VALIDATION if failed else EXIT_OK
        else:
            rows = TASK_FUNCS[cfg.task](cfg)
    except (NonConvergence, ExtrapolationUnstable) as exc:
        return EXIT_NONCONVERGENCE, f"error: {exc}\n"
    return status, render(cfg, rows)


def _parser():
    p = argparse.ArgumentParser(prog="casimir-media", description=__doc__.splitlines()[0])
    p.add_argument("command", nargs="?", choices=("run",) + tuple(HEADERS),
                   default="run", help="task to run; 'run' uses the task in the config")
    p.add_argument("config", nargs="?", help="JSON run description")
    p.add_argument("--engine", choices=("lorentz", "minkowski", "both"))
    p.add_argument("--rel-tol", type=float)
    p.add_argument("--abs-tol", type=float)
    p.add_argument("--max-nodes", type=int)
    p.add_argument("--output", help="write the table here instead of stdout")
    return p


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.config is None:
            if args.command not in ("oracle", "validate"):
                raise ConfigError("$", f"command {args.command!r} needs a config file")
            text = json.dumps({"task": args.command})
        else:
            with open(args.config, encoding="utf-8") as fh:
                text = fh.read()
        if args.command != "run":
            raw = json.loads(text)
            if isinstance(raw, dict):
                task = raw.get("task")
                if isinstance(task, dict):
                    raw["task"] = dict(task, name=args.command)
                else:
                    raw["task"] = args.command
                if args.command != "sweep":
                    raw.pop("sweep", None)
                text = json.dumps(raw)
        cfg = parse_config(text)
        overrides = {}
        if args.rel_tol is not None:
            overrides["rel_tol"] = args.rel_tol
        if args.abs_tol is not None:
            overrides["abs_tol"] = args.abs_tol
        if args.max_nodes is not None:
            overrides["max_nodes_per_axis"] = args.max_nodes
        quad = replace(cfg.quadrature, **overrides) if overrides else cfg.quadrature
        cfg = replace(cfg, quadrature=quad,
                      engine=args.engine or cfg.engine,
                      output_path=args.output or cfg.output_path)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    status, text = run(cfg)
    if status == EXIT_NONCONVERGENCE:
        sys.stderr.write(text)
        return status
    if cfg.output_path:
        with open(cfg.output_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
