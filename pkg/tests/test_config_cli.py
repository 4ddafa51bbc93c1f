import csv
import io
import json
import math
from pathlib import Path

import pytest

from casimir_media import cli
from casimir_media.config import (ConfigError, config_to_dict, dump_config, parse_config,
                                  parse_length)
from casimir_media.geometry import Gap
from casimir_media.materials import PERFECT_MIRROR, VACUUM, Constant, DrudeLorentz
from casimir_media.quadrature import Mapping

CONFIGS = Path(__file__).resolve().parent.parent / "configs"

MINIMAL = {
    "task": "force",
    "medium": {"type": "vacuum"},
    "wall1": {"type": "perfect_mirror"},
    "wall3": {"type": "perfect_mirror"},
    "plate": {"thickness": "100nm", "material": {"type": "perfect_mirror"}},
    "d1": "inf",
    "d3": "1um",
}


def with_(**changes):
    raw = json.loads(json.dumps(MINIMAL))
    raw.update(changes)
    return raw


def parse(raw):
    return parse_config(json.dumps(raw))


def error_path(raw):
    with pytest.raises(ConfigError) as info:
        parse(raw)
    return info.value.path


def rows_of(text):
    return list(csv.reader(io.StringIO(text)))


def test_minimal_defaults():
    cfg = parse(MINIMAL)
    assert cfg.engine == "both"
    assert cfg.quadrature.rel_tol == 1e-8
    assert cfg.quadrature.mapping is Mapping.EXP_SCALED
    assert cfg.medium == VACUUM
    assert cfg.wall1.termination == PERFECT_MIRROR and cfg.wall1.layers == ()
    assert math.isinf(cfg.d1) and cfg.d3 == 1e-6
    assert cfg.output_format == "csv" and cfg.output_path is None


@pytest.mark.parametrize("text, value", [
    ("200nm", 2e-7), ("1um", 1e-6), ("1e-6m", 1e-6), (" 2.5 um", 2.5e-6), ("inf", math.inf),
])
def test_lengths(text, value):
    assert parse_length(text, "d3") == value


@pytest.mark.parametrize("raw, path", [
    (with_(medium={"type": "perfect_mirror"}), "medium"),
    (with_(d3="0nm"), "d3"),
    (with_(d3="-1um"), "d3"),
    (with_(d3=1e-6), "d3"),
    (with_(d3="1 furlong"), "d3"),
    (with_(d1="inf", d3="inf"), "d1"),
    (with_(colour="red"), "$"),
    (with_(engine="newton"), "engine"),
    (with_(task="dance"), "task"),
    (with_(medium={"type": "constant", "eps": 0.5}), "medium"),
    (with_(medium={"type": "constant", "eps": 2, "chi": 1}), "medium"),
    (with_(wall1={"type": "unobtainium"}), "wall1.type"),
    (with_(wall3={"layers": [{"thickness": "1nm", "material": {"type": "perfect_mirror"}}],
                  "termination": {"type": "vacuum"}}), "wall3.layers[0].material"),
    (with_(quadrature={"rel_tol": 0}), "quadrature.rel_tol"),
    (with_(quadrature={"max_nodes": 4}), "quadrature.max_nodes"),
    (with_(sweep={"variable": "d3", "values": ["1um"]}), "sweep"),
    (with_(task="sweep", sweep={"variable": "d2", "values": ["1um"]}), "sweep.variable"),
    (with_(task="sweep", sweep={"variable": "d3", "values": ["1um", "x"]}), "sweep.values[1]"),
    (with_(output={"format": "xml"}), "output.format"),
    (with_(task={"name": "stress-profile", "points": 1}), "task.points"),
    (with_(task={"name": "stress-profile", "gap": "gap2"}), "task.gap"),
])
def test_errors_name_the_key(raw, path):
    assert error_path(raw).startswith(path)


def test_missing_cavity_key():
    raw = dict(MINIMAL)
    del raw["wall3"]
    assert error_path(raw) == "wall3"
    assert error_path({"medium": {"type": "vacuum"}}) == "task"


def test_bad_json():
    with pytest.raises(ConfigError) as info:
        parse_config("{not json")
    assert info.value.path == "$"


def test_closed_form_needs_only_medium_and_gaps():
    cfg = parse({"task": "closed-form", "medium": {"type": "constant", "eps": 2}, "d1": "inf",
                 "d3": "1um"})
    assert cfg.medium == Constant(2.0)


def test_rich_config_round_trip():
    for path in sorted(CONFIGS.glob("*.json")):
        cfg = parse_config(path.read_text())
        assert parse_config(dump_config(cfg)) == cfg


def test_drude_frequency_and_strength_forms():
    a = parse(with_(medium={"type": "drude_lorentz",
                            "electric": [{"plasma_frequency": 2e15, "damping": 1e13}]}))
    b = parse(with_(medium={"type": "drude_lorentz",
                            "electric": [{"plasma_strength": 4e30, "damping": 1e13}]}))
    assert isinstance(a.medium, DrudeLorentz)
    assert a.medium == b.medium


def test_profile_task_options():
    cfg = parse_config((CONFIGS / "gold_profile.json").read_text())
    assert cfg.task == "stress-profile"
    assert cfg.profile_gap is Gap.GAP3 and cfg.profile_points == 9
    assert len(cfg.wall3.layers) == 1


def test_json_output_round_trips():
    cfg = parse(with_(output={"format": "json"}))
    status, text = cli.run(cfg)
    assert status == 0
    doc = json.loads(text)
    assert parse_config(json.dumps(doc["config"])) == cfg
    assert doc["config"] == config_to_dict(cfg)
    assert [r["engine"] for r in doc["rows"]] == ["lorentz", "minkowski"]


def test_force_csv_header_and_symmetry():
    cfg = parse(with_(d1="1um", medium={"type": "constant", "eps": 2}))
    status, text = cli.run(cfg)
    rows = rows_of(text)
    assert status == 0
    assert rows[0] == ["engine", "d1_m", "d3_m", "force_Pa", "err_Pa"]
    for row in rows[1:]:
        assert abs(float(row[3])) <= 2 * float(row[4])


def test_ratio_closed_form_column():
    status, text = cli.run(parse_config((CONFIGS / "dielectric_ratio.json").read_text()))
    rows = rows_of(text)
    assert status == 0
    assert rows[0] == ["d3_m", "F_lorentz_Pa", "F_minkowski_Pa", "ratio", "closed_form_ratio"]
    assert float(rows[1][4]) == pytest.approx(0.83333, abs=5e-6)
    assert float(rows[1][3]) == pytest.approx(0.83333, rel=1e-2)


def test_profile_and_sweep_headers():
    _, text = cli.run(parse_config((CONFIGS / "gold_profile.json").read_text()))
    rows = rows_of(text)
    assert rows[0] == ["z_m", "stress_Pa", "err_Pa"]
    assert len(rows) == 10
    _, text = cli.run(parse_config((CONFIGS / "d3_sweep.json").read_text()))
    rows = rows_of(text)
    assert [r[2] for r in rows[1:]] == ["5e-07", "5e-07", "1e-06", "1e-06", "2e-06", "2e-06"]


def test_closed_form_rows():
    cfg = parse({"task": "closed-form", "medium": {"type": "constant", "eps": 2}, "d1": "inf",
                 "d3": "1um", "engine": "lorentz"})
    rows = rows_of(cli.run(cfg)[1])
    assert rows[0] == ["engine", "d1_m", "d3_m", "eps", "mu", "factor", "force_Pa"]
    assert float(rows[1][6]) == pytest.approx(7.6611e-4, rel=1e-4)


def test_main_exit_codes(tmp_path, capsys):
    good = tmp_path / "good.json"
    good.write_text(json.dumps(MINIMAL))
    assert cli.main(["run", str(good)]) == 0
    out = capsys.readouterr().out
    assert out.startswith("engine,d1_m,d3_m,force_Pa,err_Pa\n")

    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(with_(medium={"type": "perfect_mirror"})))
    assert cli.main(["run", str(bad)]) == 2
    assert "medium" in capsys.readouterr().err

    assert cli.main(["run", str(good), "--max-nodes", "16", "--rel-tol", "1e-15",
                     "--engine", "minkowski"]) == 3

    dest = tmp_path / "out.csv"
    assert cli.main(["closed-form", str(good), "--output", str(dest)]) == 0
    assert dest.read_text().startswith("engine,d1_m,d3_m,eps,mu,factor,force_Pa\n")


def test_validation_failure_exit(monkeypatch, capsys):
    real = cli.validation_checks

    def broken(spec):
        checks = real(spec)
        name, expected, measured, tol, rel = checks[0]
        return [(name, expected * 2, measured, tol, rel)] + checks[1:]

    monkeypatch.setattr(cli, "validation_checks", broken)
    assert cli.main(["validate"]) == 4
    assert ",false" in capsys.readouterr().out


def test_validate_bundle_passes_and_is_deterministic(capsys):
    assert cli.main(["validate"]) == 0
    first = capsys.readouterr().out
    assert cli.main(["validate"]) == 0
    assert capsys.readouterr().out == first
    rows = rows_of(first)
    assert rows[0] == ["check_name", "expected", "measured", "tolerance", "pass"]
    assert all(r[4] == "true" for r in rows[1:])
