import json
import subprocess
import sys

import numpy as np
import pytest

from plasmavac.cli import main

SMALL = "n1: 16\nn2: 8\nt_final: 1.0\nforcing_duration: 0.5\ngamma_list: [2, 4, 8]\nsnapshots: 2\n"


@pytest.fixture
def small_cfg(tmp_path):
    p = tmp_path / "small.yaml"
    p.write_text(SMALL)
    return p


def _manifest_id_in_every_file(out):
    man = json.loads((out / "manifest.json").read_text())
    mid = man["manifest_id"]
    for f in out.iterdir():
        if f.name == "manifest.json":
            continue
        if f.suffix == ".json":
            assert json.loads(f.read_text())["manifest_id"] == mid, f.name
        elif f.suffix == ".csv":
            assert f.read_text().splitlines()[0] == f"# manifest_id={mid}", f.name
        elif f.suffix == ".npz":
            assert str(np.load(f)["manifest_id"]) == mid
        elif f.suffix == ".png":
            assert mid.encode() in f.read_bytes(), f.name
    return man


def test_eigen(tmp_path, capsys):
    assert main(["eigen", "-0.5", "0.1", "0.2", "0.5", "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "incoming: B~1 2" in out
    data = json.loads((tmp_path / "eigen.json").read_text())
    assert data["incoming_btilde1"] == 2 and data["incoming_W_formulation"] == 2
    _manifest_id_in_every_file(tmp_path)


def test_eigen_refused(tmp_path, capsys):
    assert main(["eigen", "2.5", "0", "0", "0.5", "--out", str(tmp_path)]) == 2
    assert "refused" in capsys.readouterr().err


def test_verify_list(capsys):
    assert main(["verify", "--list"]) == 0
    assert len(capsys.readouterr().out.split()) >= 12


def test_verify_json_and_unknown(tmp_path, capsys):
    assert main(["verify", "--suite", "linalg", "--samples", "20", "--json", "--out", str(tmp_path)]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["ok"] and rep["failing"] == []
    assert main(["verify", "--suite", "nope", "--out", str(tmp_path)]) == 2


def test_verify_injected_failure(tmp_path, capsys):
    code = main(["verify", "--suite", "lift", "--samples", "10", "--inject", "lift.trace_equals_front",
                 "--out", str(tmp_path)])
    assert code == 1
    assert "failing: lift.trace_equals_front" in capsys.readouterr().out


def test_lift(tmp_path):
    assert main(["lift", "--n", "16", "--out", str(tmp_path)]) == 0
    assert (tmp_path / "lift.png").exists()
    _manifest_id_in_every_file(tmp_path)


def test_simulate_outputs_and_determinism(tmp_path, small_cfg):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["simulate", "--config", str(small_cfg), "--out", str(a)]) == 0
    assert main(["simulate", "--config", str(small_cfg), "--out", str(b)]) == 0
    names = sorted(f.name for f in a.iterdir())
    for expected in ("run.json", "norms.csv", "energy.csv", "constraints.csv", "energy.png", "fields.npz",
                     "manifest.json"):
        assert expected in names
    for n in names:
        assert (a / n).read_bytes() == (b / n).read_bytes(), n
    man = _manifest_id_in_every_file(a)
    assert sorted(man["files"]) == sorted(n for n in names if n != "manifest.json")


def test_gamma_sweep(tmp_path, small_cfg, capsys):
    code = main(["gamma-sweep", "--config", str(small_cfg), "--gamma", "2,4", "--out", str(tmp_path)])
    assert code in (0, 1)
    sweep = json.loads((tmp_path / "sweep.json").read_text())
    assert [r["gamma"] for r in sweep["rows"]] == [2.0, 4.0]
    header = (tmp_path / "sweep.csv").read_text().splitlines()[1]
    assert header.startswith("gamma,ratio,lhs")
    _manifest_id_in_every_file(tmp_path)


def test_flagged_sweep_exits_zero(tmp_path, capsys):
    cfg = tmp_path / "e.yaml"
    cfg.write_text(SMALL + "calE1_hat: 1.0\noverride_gates: true\n")
    assert main(["gamma-sweep", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 0
    assert "FLAGGED" in capsys.readouterr().err


def test_bad_config(tmp_path, capsys):
    cfg = tmp_path / "bad.yaml"
    cfg.write_text("n1: 2\ncfl: 3\n")
    assert main(["simulate", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 2
    err = capsys.readouterr().err
    assert "n1" in err and "cfl" in err


def test_env_output_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("PLASMAVAC_OUT", str(tmp_path / "env"))
    assert main(["eigen", "0.5", "0", "0", "0.5"]) == 0
    assert (tmp_path / "env" / "eigen.json").exists()


def test_module_entry_point(tmp_path):
    r = subprocess.run([sys.executable, "-m", "plasmavac", "eigen", "0.5", "0", "0", "0.5", "--out", str(tmp_path)],
                       capture_output=True, text=True)
    assert r.returncode == 0
    assert "incoming: B~1 4" in r.stdout
