import json
import math

import numpy as np
import pytest

from floquet_cavity import ConfigError
from floquet_cavity.cli import main
from floquet_cavity.config import parse_config

PI = math.pi

HARMONIC = {"segments": [{"kind": "harmonic", "L": 1.0, "A": 0.1, "omega": PI}]}


def cfg_text(command, params, protocol=HARMONIC, **extra):
    doc = {"command": command, "params": params, **extra}
    if protocol is not None:
        doc["protocol"] = protocol
    return json.dumps(doc)


def test_parse_minimal_map_run():
    cfg = parse_config(cfg_text("map", {"samples": 64}))
    assert cfg.command == "map"
    assert cfg.params["samples"] == 64
    assert cfg.params["t0"] == 0.0
    assert cfg.protocol is not None


def test_superluminal_protocol_rejected():
    bad = {"segments": [{"kind": "harmonic", "L": 1.0, "A": 0.4, "omega": 3.0}]}
    with pytest.raises(ConfigError, match="superluminal"):
        parse_config(cfg_text("map", {}, protocol=bad))


def test_unknown_key_rejected_with_path():
    bad = {"segments": [{"kind": "harmonic", "L": 1.0, "A": 0.1,
                         "omega": 3.0, "amplitdue": 0.1}]}
    with pytest.raises(ConfigError) as err:
        parse_config(cfg_text("map", {}, protocol=bad))
    assert "protocol.segments[0].amplitdue" in str(err.value)


def test_unknown_param_rejected():
    with pytest.raises(ConfigError, match="params.sampels"):
        parse_config(cfg_text("map", {"sampels": 32}))


def test_missing_protocol_rejected():
    with pytest.raises(ConfigError, match="protocol"):
        parse_config(cfg_text("map", {}, protocol=None))


def test_time_reverse_directive_builds_spliced_protocol():
    doc = {"command": "map", "params": {},
           "protocol": {**HARMONIC, "time_reverse": {"at": 4.0, "q": 1}}}
    cfg = parse_config(json.dumps(doc))
    z, _ = cfg.protocol.evaluate(5.0)
    assert z == pytest.approx(1.0 - 0.1 * math.sin(PI * 5.0), abs=1e-12)


def run_cli(tmp_path, doc, fmt="csv"):
    tmp_path.mkdir(parents=True, exist_ok=True)
    cfg_path = tmp_path / "run.json"
    cfg_path.write_text(json.dumps(doc))
    out = tmp_path / "out"
    code = main(["--config", str(cfg_path), "--out", str(out), "--format", fmt])
    return code, out


def test_cli_fixed_points_census(tmp_path):
    doc = {"command": "fixed-points", "protocol": HARMONIC,
           "params": {"samples": 1024}}
    code, out = run_cli(tmp_path, doc)
    assert code == 0
    lines = (out / "fixed_points.csv").read_text().splitlines()
    headers = [ln for ln in lines if not ln.startswith("#")]
    assert headers[0] == "x,multiplier,stability"
    rows = headers[1:]
    assert len(rows) == 2
    stabilities = sorted(r.split(",")[2] for r in rows)
    assert stabilities == ["stable", "unstable"]


def test_cli_casimir_weak_constant_density(tmp_path):
    doc = {"command": "casimir",
           "params": {"method": "weak", "q": 1, "A": 0.02, "L": 1.0,
                      "n": 3.0, "samples": 64}}
    code, out = run_cli(tmp_path, doc)
    assert code == 0
    rows = [ln for ln in (out / "casimir.csv").read_text().splitlines()
            if not ln.startswith("#")][1:]
    vals = np.array([float(r.split(",")[1]) for r in rows])
    assert np.allclose(vals, -PI / 48.0, atol=1e-14)


def test_cli_time_reverse_summary(tmp_path):
    protocol = {"segments": [{"kind": "harmonic", "L": 1.0, "A": 0.15, "omega": PI}]}
    doc = {"command": "time-reverse", "protocol": protocol,
           "params": {"n_compress": 8, "rays": 8}}
    code, out = run_cli(tmp_path, doc)
    assert code == 0
    summary = json.loads((out / "time_reverse_summary.json").read_text())
    assert summary["scalars"]["max_return_error"] <= 1e-8
    assert summary["scalars"]["t_star"] == pytest.approx(16.0)


def test_cli_deterministic_outputs(tmp_path):
    doc = {"command": "map", "protocol": HARMONIC, "params": {"samples": 128}}
    cfg_path = tmp_path / "run.json"
    cfg_path.write_text(json.dumps(doc))
    outs = []
    for sub in ("a", "b"):
        out = tmp_path / sub
        assert main(["--config", str(cfg_path), "--out", str(out)]) == 0
        outs.append((out / "map.csv").read_bytes())
    assert outs[0] == outs[1]
    s_a = json.loads((tmp_path / "a" / "map_summary.json").read_text())
    s_b = json.loads((tmp_path / "b" / "map_summary.json").read_text())
    s_a.pop("wall_time_s")
    s_b.pop("wall_time_s")
    assert s_a == s_b


def test_cli_summary_config_reparses(tmp_path):
    doc = {"command": "lightcones", "protocol": HARMONIC,
           "params": {"samples": 256, "grid": 32}}
    code, out = run_cli(tmp_path, doc)
    assert code == 0
    summary = json.loads((out / "lightcones_summary.json").read_text())
    cfg = parse_config(json.dumps(summary["config"]))
    assert cfg.command == "lightcones"


def test_cli_exit_codes(tmp_path):
    # config error -> 2
    code, _ = run_cli(tmp_path, {"command": "map", "params": {}})
    assert code == 2
    # unreadable config -> 4
    assert main(["--config", str(tmp_path / "missing.json"), "--out", str(tmp_path)]) == 4
    # numerical failure (horizon exceeded) -> 3
    bounded = {"segments": [{"kind": "constant", "L": 1.0, "duration": 2.0}]}
    doc = {"command": "evolve", "protocol": bounded,
           "params": {"t": 5.0, "samples": 64}}
    code, _ = run_cli(tmp_path, doc)
    assert code == 3


def test_cli_json_format(tmp_path):
    doc = {"command": "map", "protocol": HARMONIC, "params": {"samples": 64}}
    code, out = run_cli(tmp_path, doc, fmt="json")
    assert code == 0
    table = json.loads((out / "map.json").read_text())
    assert table["columns"] == ["x", "F", "multiplier"]
    assert len(table["rows"]) == 64


def test_cli_scan(tmp_path):
    doc = {"command": "scan", "protocol": HARMONIC,
           "params": {"L_min": 0.85, "L_max": 1.15, "count": 5, "samples": 512}}
    code, out = run_cli(tmp_path, doc)
    assert code == 0
    summary = json.loads((out / "scan_summary.json").read_text())
    assert summary["scalars"]["counts"] == [0, 2, 2, 2, 0]


def test_cli_medium_run(tmp_path):
    doc = {
        "command": "medium",
        "schedule": {"L": 1.0, "regions": [
            {"x_lo": 0.0, "x_hi": 1.0,
             "eps": {"times": [0.0], "values": [1.0]},
             "mu": {"times": [0.0], "values": [1.0]}},
            {"x_lo": 1.0, "x_hi": 2.0,
             "eps": {"times": [0.0, 1.3], "values": [1.21, 1.0], "period": 2.1},
             "mu": {"times": [0.0], "values": [1.0]}},
        ]},
        "params": {"t_end": 5.0,
                   "rays": [{"x": 0.1}, {"x": 0.12, "amplitude": 2.0}]},
    }
    code, out = run_cli(tmp_path, doc)
    assert code == 0
    rows = [ln for ln in (out / "medium.csv").read_text().splitlines()
            if not ln.startswith("#")][1:]
    assert len(rows) >= 4


def test_cli_sweep_estimate(tmp_path):
    doc = {"command": "sweep-estimate",
           "params": {"Q": 100.0, "v": 0.01, "Q_M": 500.0}}
    code, out = run_cli(tmp_path, doc)
    assert code == 0
    summary = json.loads((out / "sweep_estimate_summary.json").read_text())
    assert summary["scalars"]["gain_feasible"] is True
    assert summary["scalars"]["max_compression"] == pytest.approx(math.exp(2.0))


def test_cli_iterate_with_seeded_random_starts(tmp_path):
    doc = {"command": "iterate", "protocol": HARMONIC,
           "params": {"n": 5, "starts": {"random": 6}}, "seed": 42}
    code, out = run_cli(tmp_path, doc)
    assert code == 0
    rows = [ln for ln in (out / "iterate.csv").read_text().splitlines()
            if not ln.startswith("#")][1:]
    assert len(rows) == 6 * 6  # 6 starts, steps 0..5
    # same seed reproduces the same table
    code2, out2 = run_cli(tmp_path / "again", doc)
    assert (out / "iterate.csv").read_bytes() == (out2 / "iterate.csv").read_bytes()


def test_cli_evolve_bump(tmp_path):
    doc = {"command": "evolve", "protocol": HARMONIC,
           "params": {"t": 0.5, "samples": 512,
                      "init": {"kind": "bump", "center": 0.2, "width": 0.1}}}
    code, out = run_cli(tmp_path, doc)
    assert code == 0
    rows = [ln for ln in (out / "evolve_field.csv").read_text().splitlines()
            if not ln.startswith("#")][1:]
    vals = np.array([float(r.split(",")[1]) for r in rows])
    assert 0.0 < np.mean(np.abs(vals) > 0.5) < 0.2  # a transported bump


def test_cli_energy_run(tmp_path):
    doc = {"command": "energy", "protocol": HARMONIC,
           "params": {"periods": 3, "samples": 512, "init": {"kind": "sawtooth"}}}
    code, out = run_cli(tmp_path, doc)
    assert code == 0
    summary = json.loads((out / "energy_summary.json").read_text())
    totals = summary["scalars"]["totals"]
    assert [row[0] for row in totals] == [1, 2, 3]
    energies = [row[2] for row in totals]
    assert energies == sorted(energies)  # resonant drive pumps energy in
