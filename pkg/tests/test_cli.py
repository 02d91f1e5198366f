import hashlib
import json
from pathlib import Path

import pytest

from sgvertex.cli import main, read_config_file


def run(args):
    return main(args)


def dir_hashes(d):
    return {
        p.name: hashlib.sha256(p.read_bytes()).hexdigest()
        for p in sorted(Path(d).iterdir())
    }


def test_check_passes(tmp_path):
    out = tmp_path / "chk"
    assert run(["check", "--out", str(out)]) == 0
    report = json.loads((out / "report.json").read_text())
    assert report["passed"]
    assert all(s["passed"] for s in report["suites"].values())
    assert "config_hash" in report


def test_check_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run(["check", "--out", str(a), "--seed", "7"]) == 0
    assert run(["check", "--out", str(b), "--seed", "7"]) == 0
    assert dir_hashes(a) == dir_hashes(b)


def test_invalid_eta_rejected(tmp_path, capsys):
    code = run(["diag", "--eta", "4.0", "--out", str(tmp_path / "x")])
    assert code != 0


def test_dimension_guard(tmp_path):
    code = run(["diag", "--L", "24", "--out", str(tmp_path / "x")])
    assert code != 0


def test_diag_outputs(tmp_path):
    out = tmp_path / "d"
    assert run(["diag", "--L", "6", "--eta", "0.7", "--labels", "--out", str(out)]) == 0
    report = json.loads((out / "report.json").read_text())
    assert (out / "spectrum.csv").exists()
    assert (out / "operator.csv").exists()
    desc = json.loads((out / "operator.json").read_text())
    assert desc["convention"]["sigma"] == pytest.approx(2.0, abs=1e-9)
    assert report["hermiticity_residual"] < 1e-10
    header = (out / "spectrum.csv").read_text().splitlines()[0]
    assert header == "level,energy_re,energy_im,label_re,label_im"


def test_bethe_outputs(tmp_path):
    out = tmp_path / "b"
    assert run(["bethe", "--L", "8", "--all-states", "--out", str(out)]) == 0
    report = json.loads((out / "report.json").read_text())
    assert len(report["states"]) == 1  # half-filled sector: ground state only
    st = report["states"][0]
    assert st["converged"] and st["residual"] <= 1e-12
    # roots are serialized at full precision
    assert all(float(r) == float(r) for r in st["roots"])


def test_scan_outputs_and_plotdata(tmp_path):
    out = tmp_path / "s"
    assert run([
        "scan", "--observable", "mass", "--source", "continuum",
        "--theta-grid", "4:8:9", "--out", str(out),
    ]) == 0
    report = json.loads((out / "report.json").read_text())
    assert report["fit"]["relative_deviation"] <= 1e-10
    lines = (out / "plotdata.csv").read_text().splitlines()
    assert lines[0] == "h,value,fit"
    assert len(lines) == 10


def test_config_file_and_flag_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("eta = 0.9\ntheta = 1.5   # comment\nL = 6\n")
    parsed = read_config_file(cfg)
    assert parsed == {"eta": "0.9", "theta": "1.5", "L": "6"}
    out1 = tmp_path / "o1"
    assert run(["diag", "--config", str(cfg), "--out", str(out1)]) == 0
    rep1 = json.loads((out1 / "report.json").read_text())
    assert rep1["config"]["eta"] == 0.9
    # flags win over the file
    out2 = tmp_path / "o2"
    assert run(["diag", "--config", str(cfg), "--eta", "1.1", "--out", str(out2)]) == 0
    rep2 = json.loads((out2 / "report.json").read_text())
    assert rep2["config"]["eta"] == 1.1


def test_vacuum_resonant_point_reported(tmp_path):
    import math

    out = tmp_path / "v"
    assert run(["vacuum", "--eta", str(math.pi / 2), "--theta", "4", "--out", str(out)]) == 0
    report = json.loads((out / "report.json").read_text())
    assert "singular_error" in report
