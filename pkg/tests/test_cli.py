"""Command-line interface: files, exit codes, determinism and resume."""

import json
import subprocess
import sys

import pytest

from slelab.cli import RunManifest, _parse_grid, main, real
from slelab.experiments import validate_record
from slelab.geometry import PolylineCurve


def run(argv):
    return main([str(a) for a in argv])


def test_sample_writes_csv_and_sidecar(tmp_path):
    out = tmp_path / "c.csv"
    assert run(["sample", "--kind", "chordal", "--kappa", 4, "--dt", 1e-4, "--tmax", 0.05, "--seed", 7,
                "--out", out]) == 0
    assert out.read_text().splitlines()[0] == "t,re,im"
    curve = PolylineCurve.from_csv(out)
    assert curve.vertices[0] == 0j
    side = json.loads(out.with_suffix(".json").read_text())
    assert side["kind"] == "chordal" and side["kappa"] == 4.0 and side["dt_base"] == 1e-4
    assert side["seed"]["master_seed"] == 7 and side["stop_criterion"] == {"t_max": 0.05}


@pytest.mark.parametrize(
    "extra",
    [
        ["--kind", "chordal", "--tmax", 0.2],
        ["--kind", "radial", "--tmax", 0.2],
        ["--kind", "two-sided", "--theta", 1.0, "--cr-stop", 0.5],
    ],
)
def test_sample_is_byte_identical(tmp_path, extra):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for out in (a, b):
        assert run(["sample", "--kappa", 8 / 3, "--dt", 1e-3, "--seed", 3, "--out", out] + extra) == 0
    assert a.read_bytes() == b.read_bytes()
    assert a.with_suffix(".json").read_bytes() == b.with_suffix(".json").read_bytes()


def test_sample_exit_codes(tmp_path):
    out = tmp_path / "c.csv"
    assert run(["sample", "--kind", "chordal", "--kappa", 6, "--tmax", 1, "--out", out]) == 2
    assert run(["sample", "--kind", "chordal", "--kappa", 4, "--out", out]) == 2
    assert run(["sample", "--kind", "bogus", "--kappa", 4, "--out", out]) == 2
    assert run(["sample", "--kind", "chordal", "--kappa", 4, "--dt", 1e-2, "--tmax", 1, "--max-steps", 10,
                "--out", out]) == 3
    assert not out.exists()


def test_console_entry_point(tmp_path):
    out = tmp_path / "c.csv"
    proc = subprocess.run([sys.executable, "-m", "slelab.cli", "sample", "--kind", "chordal", "--kappa", "6",
                           "--tmax", "1", "--out", str(out)], capture_output=True, text=True)
    assert proc.returncode == 2
    assert "kappa" in proc.stderr


def test_grid_parsing():
    assert _parse_grid("0.5:0.5:2.5") == [0.5, 1.0, 1.5, 2.0, 2.5]
    assert _parse_grid("1,2, 3") == [1.0, 2.0, 3.0]


def experiment(tmp_path, *extra):
    return run(["experiment", "--out-dir", tmp_path / "runs", *extra])


def test_kappa_accepts_fractions():
    assert real("8/3") == 8 / 3
    assert real(" 4 ") == 4.0 and real("2.5") == 2.5
    for bad in ("x/3", "1/0", ""):
        with pytest.raises(Exception):
            real(bad)


def test_thm1_smoke_run(tmp_path, capsys):
    code = experiment(tmp_path, "--id", "thm1", "--kappa", 4, "--grid", "0.5:0.5:2.5", "--replicates", 100,
                      "--chunk", 50, "--run-id", "smoke")
    assert code == 0
    run_dir = tmp_path / "runs" / "smoke"
    rec = json.loads((run_dir / "record.json").read_text())
    validate_record(rec)
    assert len(rec["cells"]) == 5
    assert (run_dir / "cells.csv").read_text().startswith("x,n,hits,p_hat,stderr")
    manifest = RunManifest.load(run_dir / "manifest.json")
    assert manifest.status == "done" and manifest.completed == "11"
    out = capsys.readouterr().out
    assert "thm1 slope=" in out or "thm1 slope=nan" in out


def test_invalid_config_exit_code(tmp_path):
    assert experiment(tmp_path, "--id", "thm1", "--grid", "2,1") == 2
    assert experiment(tmp_path, "--id", "thm1", "--replicates", 5) == 2
    bad = tmp_path / "bad.json"
    bad.write_text('{"experiment_id": "thm1", "what": 1}')
    assert experiment(tmp_path, "--config", bad) == 2
    assert experiment(tmp_path, "--resume", "missing") == 2


def test_partial_run_then_resume_equals_fresh(tmp_path):
    args = ["--id", "at_most_half", "--replicates", 1000, "--n-random", 2]
    assert experiment(tmp_path, *args, "--run-id", "part", "--max-units", 3) == 4
    manifest = json.loads((tmp_path / "runs" / "part" / "manifest.json").read_text())
    assert manifest["completed"] == "111000" and manifest["status"] == "pending"
    assert not (tmp_path / "runs" / "part" / "record.json").exists()
    assert experiment(tmp_path, "--resume", "part") == 0
    assert experiment(tmp_path, *args, "--run-id", "fresh") == 0
    a = json.loads((tmp_path / "runs" / "part" / "record.json").read_text())
    b = json.loads((tmp_path / "runs" / "fresh" / "record.json").read_text())
    for rec in (a, b):
        rec.pop("wall_time_s")
    assert a == b


def test_config_file_with_flag_override(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"experiment_id": "theta_stationary", "replicates": 100, "grid": [0.5],
                               "dt_base": 0.01}))
    assert experiment(tmp_path, "--config", cfg, "--replicates", 200, "--run-id", "th") == 0
    rec = json.loads((tmp_path / "runs" / "th" / "record.json").read_text())
    assert rec["config"]["replicates"] == 200
    assert rec["cells"][0]["n"] == 200
    assert experiment(tmp_path, "--config", cfg, "--run-id", "th") == 2  # run id already used
