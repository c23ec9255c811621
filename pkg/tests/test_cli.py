import json
import subprocess
import sys

import numpy as np
import pytest

BASE_CONFIG = {
    "materials": {"background": {"lambda": 1.5, "mu": 1.2},
                  "inclusion": {"lambda": 0.6, "mu": 0.4}},
    "shape": {"kind": "perturbedDisk", "center": [0.0, 0.0], "radius": 1.0,
              "coefficients": [[0.0, 0.0], [0.0, 0.0], [0.02, 0.0]]},
    "order": 4,
    "nodes": 64,
    "noise": None,
    "outputDir": "out",
    "thetaSamples": 128,
}


def run_cli(*args, cwd):
    return subprocess.run([sys.executable, "-m", "emtshape", *args],
                          cwd=cwd, capture_output=True, text=True)


def write_config(path, **overrides):
    config = {**BASE_CONFIG, **overrides}
    path.write_text(json.dumps(config))
    return config


def test_roundtrip_outputs(tmp_path):
    write_config(tmp_path / "config.json")
    result = run_cli("roundtrip", "config.json", cwd=tmp_path)
    assert result.returncode == 0, result.stderr
    out = tmp_path / "out"
    for name in ("emt_table.json", "shape_estimate.json", "boundary.csv",
                 "overlay.svg", "report.json"):
        assert (out / name).exists()

    report = json.loads((out / "report.json").read_text())
    assert report["error"]["hausdorff"] < 0.01
    assert abs(complex(*report["estimate"]["a0"])) < 0.01
    assert report["estimate"]["gamma"] == pytest.approx(1.0, abs=0.01)

    csv_lines = (out / "boundary.csv").read_text().strip().splitlines()
    assert csv_lines[0] == "theta,x,y"
    assert len(csv_lines) == 1 + 128
    theta, x, y = (float(v) for v in csv_lines[1].split(","))
    assert theta == 0.0
    assert np.isfinite(x) and np.isfinite(y)

    svg = (out / "overlay.svg").read_text()
    assert "#999999" in svg and "#000000" in svg
    assert svg.count("<polygon") == 2


def test_roundtrip_deterministic(tmp_path):
    write_config(tmp_path / "config.json", noise={"sigma2": 0.02, "seed": 11})
    assert run_cli("roundtrip", "config.json", cwd=tmp_path).returncode == 0
    assert run_cli("roundtrip", "config.json", "--out", "out2", cwd=tmp_path).returncode == 0
    for name in ("emt_table.json", "shape_estimate.json", "boundary.csv",
                 "overlay.svg", "report.json"):
        first = (tmp_path / "out" / name).read_bytes()
        second = (tmp_path / "out2" / name).read_bytes()
        assert first == second, f"{name} differs between identical runs"


def test_forward_then_reconstruct(tmp_path):
    write_config(tmp_path / "config.json")
    result = run_cli("forward", "config.json", "--noise-var", "0.05", "--seed", "3",
                     "--out", "fwd", cwd=tmp_path)
    assert result.returncode == 0, result.stderr
    table_doc = json.loads((tmp_path / "fwd" / "emt_table.json").read_text())
    assert table_doc["provenance"] == {"kind": "noisy", "sigma2": 0.05, "seed": 3}

    result = run_cli("reconstruct", "config.json", "fwd/emt_table.json",
                     "--out", "rec", cwd=tmp_path)
    assert result.returncode == 0, result.stderr
    assert (tmp_path / "rec" / "shape_estimate.json").exists()
    assert not (tmp_path / "rec" / "report.json").exists()


def test_flag_overrides(tmp_path):
    write_config(tmp_path / "config.json")
    result = run_cli("forward", "config.json", "--order", "2", "--nodes", "32",
                     "--out", "small", cwd=tmp_path)
    assert result.returncode == 0, result.stderr
    doc = json.loads((tmp_path / "small" / "emt_table.json").read_text())
    assert doc["order"] == 2
    assert len(doc["entries"]) == 2 * 2 * 2 * 2


def test_malformed_config_exits_2(tmp_path):
    (tmp_path / "config.json").write_text("{not json")
    result = run_cli("forward", "config.json", cwd=tmp_path)
    assert result.returncode == 2
    assert "configuration error" in result.stderr


def test_missing_config_exits_2(tmp_path):
    result = run_cli("forward", "absent.json", cwd=tmp_path)
    assert result.returncode == 2


@pytest.mark.parametrize("break_config", [
    lambda c: c.update(order=0),
    lambda c: c.update(nodes=33),
    lambda c: c["materials"]["background"].pop("mu"),
    lambda c: c.update(shape={"kind": "mystery"}),
    lambda c: c.update(shape={"kind": "starfish", "center": [0.0, 0.0],
                              "modeAmplitude": 1.0, "modeIndex": 1}),
    lambda c: c.pop("outputDir"),
])
def test_invalid_config_exits_2(tmp_path, break_config):
    config = {**BASE_CONFIG}
    config["materials"] = {k: dict(v) for k, v in config["materials"].items()}
    break_config(config)
    (tmp_path / "config.json").write_text(json.dumps(config))
    result = run_cli("forward", "config.json", cwd=tmp_path)
    assert result.returncode == 2, result.stderr


def test_seed_without_variance_exits_2(tmp_path):
    write_config(tmp_path / "config.json")
    result = run_cli("forward", "config.json", "--seed", "4", cwd=tmp_path)
    assert result.returncode == 2
    assert "seed" in result.stderr


def test_contradictory_table_exits_1(tmp_path):
    write_config(tmp_path / "config.json")
    entries = [{"n": n, "m": m, "t": t, "s": s, "value": 1.0}
               for n in (1, 2) for m in (1, 2) for t in (1, 2) for s in (1, 2)]
    (tmp_path / "table.json").write_text(json.dumps(
        {"order": 2, "provenance": {"kind": "exact"}, "entries": entries}))
    result = run_cli("reconstruct", "config.json", "table.json", cwd=tmp_path)
    assert result.returncode == 1
    assert "numerical failure" in result.stderr


def test_invalid_table_schema_exits_2(tmp_path):
    write_config(tmp_path / "config.json")
    (tmp_path / "table.json").write_text(json.dumps({"order": 2, "entries": []}))
    result = run_cli("reconstruct", "config.json", "table.json", cwd=tmp_path)
    assert result.returncode == 2


def test_oracle_suite_passes(tmp_path):
    result = run_cli("oracle", cwd=tmp_path)
    assert result.returncode == 0, result.stdout + result.stderr
    lines = [l for l in result.stdout.splitlines() if l.strip()]
    assert len(lines) == 12
    assert all(line.startswith("PASS") for line in lines)
