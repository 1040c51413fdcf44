import json
import os
import subprocess
import sys

import numpy as np
import pytest

from filament_lab import io
from filament_lab._spectral import worker_count
from filament_lab.cli import main
from filament_lab.spin_field import make_scenario_field


def _write_config(path, outdir, N=32, kind="circle", params=None, n_steps=100, **integ):
    doc = {
        "constants": {"R0": 1.0, "m0": 1.0, "t0": 1.0, "gamma": 1.0, "sigma": -1},
        "grid": {"N": N},
        "scenario": {"kind": kind, "params": params or {}},
        "integrator": {"method": "midpoint", "n_steps": n_steps, "monitor_every": 10, **integ},
        "outputs": {
            "drift_csv": str(outdir / "drift.csv"),
            "field_csv": str(outdir / "field.csv"),
            "curve_csv": str(outdir / "curve.csv"),
            "report_json": str(outdir / "report.json"),
            "curve_obj": str(outdir / "curve.obj"),
            "curve_svg": str(outdir / "curve.svg"),
            "curve_taus": [0.0],
        },
    }
    path.write_text(json.dumps(doc))
    return path


def test_simulate_circle(tmp_path, capsys):
    cfg = _write_config(tmp_path / "c.json", tmp_path / "out")
    assert main(["simulate", str(cfg)]) == 0
    drift = io.read_drift_csv(tmp_path / "out" / "drift.csv")
    energy = drift[:, io.DRIFT_HEADER.index("spin_energy")]
    assert np.max(np.abs(energy - energy[0])) <= 1e-12
    assert len(drift) == 11
    for name in ("field.csv", "curve.csv", "report.json", "curve.obj", "curve.svg", "curve_tau0.csv"):
        assert (tmp_path / "out" / name).exists(), name
    report = json.loads((tmp_path / "out" / "report.json").read_text())
    assert report["aborted"] is False
    assert report["run"]["n_steps"] == 100
    # a stationary state has no flow direction to compare against
    assert "inapplicable" in report["bracket_flow"]


def test_simulate_kelvin_horizon_one(tmp_path):
    N = 64
    dtau = 0.1 * (2 * np.pi / N) ** 2
    n = int(np.ceil(1.0 / dtau))
    cfg = _write_config(tmp_path / "k.json", tmp_path / "k", N=N, kind="kelvin_perturbed", params={"m": 3, "eps": 0.05}, n_steps=n, monitor_every=n // 10)
    assert main(["simulate", str(cfg)]) == 0
    report = json.loads((tmp_path / "k" / "report.json").read_text())
    assert report["tau"] >= 1.0
    d = report["drift"]
    assert d["spin_energy_rel"] <= 1e-8
    assert d["phi_max"] <= 1e-9
    assert d["f_rel"] <= 1e-7
    assert d["unit_norm_max"] <= 1e-12
    assert report["bracket_flow"]["kappa"] == pytest.approx(2 / np.pi, abs=1e-6)


def test_simulate_beta_override(tmp_path):
    cfg = _write_config(tmp_path / "k.json", tmp_path / "o", kind="kelvin_perturbed", params={"m": 2, "eps": 0.1}, n_steps=5)
    doc = json.loads(cfg.read_text())
    doc["overrides"] = {"beta_override": -np.pi}
    cfg.write_text(json.dumps(doc))
    assert main(["simulate", str(cfg)]) == 0
    report = json.loads((tmp_path / "o" / "report.json").read_text())
    assert report["bracket_flow"]["kappa"] == pytest.approx(1.0, abs=1e-6)


def test_simulate_odd_grid(tmp_path, capsys):
    cfg = _write_config(tmp_path / "odd.json", tmp_path / "x", N=33)
    assert main(["simulate", str(cfg)]) == 2
    assert "even" in capsys.readouterr().err


def test_simulate_missing_config(tmp_path, capsys):
    assert main(["simulate", str(tmp_path / "nope.json")]) == 2


def test_simulate_numerical_abort(tmp_path, capsys):
    cfg = _write_config(
        tmp_path / "a.json", tmp_path / "a", kind="kelvin_perturbed", params={"m": 3, "eps": 0.05}, n_steps=3, dtau=5.0, max_iter=20
    )
    assert main(["simulate", str(cfg)]) == 3
    assert "numerical abort" in capsys.readouterr().err
    report = json.loads((tmp_path / "a" / "report.json").read_text())
    assert report["aborted"] is True and "abort_reason" in report
    assert (tmp_path / "a" / "drift.csv").exists()


def test_simulate_is_deterministic(tmp_path):
    outs = []
    for tag in ("r1", "r2"):
        cfg = _write_config(tmp_path / f"{tag}.json", tmp_path / tag, kind="kelvin_perturbed", params={"m": 3, "eps": 0.1}, n_steps=30)
        assert main(["simulate", str(cfg)]) == 0
        outs.append({p.name: p.read_bytes() for p in sorted((tmp_path / tag).iterdir())})
    assert outs[0] == outs[1]


def test_simulate_thread_cap_does_not_change_output(tmp_path):
    blobs = []
    for threads in ("1", "4"):
        out = tmp_path / f"t{threads}"
        cfg = _write_config(tmp_path / f"t{threads}.json", out, kind="kelvin_perturbed", params={"m": 2, "eps": 0.1}, n_steps=20)
        env = dict(os.environ, FILAMENT_LAB_THREADS=threads)
        subprocess.run([sys.executable, "-m", "filament_lab", "simulate", str(cfg)], check=True, env=env)
        blobs.append((out / "field.csv").read_bytes() + (out / "report.json").read_bytes())
    assert blobs[0] == blobs[1]


def test_worker_count_env(monkeypatch):
    monkeypatch.setenv("FILAMENT_LAB_THREADS", "3")
    assert worker_count() == 3
    monkeypatch.setenv("FILAMENT_LAB_THREADS", "junk")
    assert worker_count() >= 1


# -- invariants --------------------------------------------------------------------------

@pytest.fixture
def circle_csv(tmp_path):
    path = tmp_path / "circle.csv"
    io.write_field_csv(path, make_scenario_field("circle", 128))
    return path


def test_invariants_circle(circle_csv, capsys):
    assert main(["invariants", str(circle_csv)]) == 0
    doc = json.loads(capsys.readouterr().out)
    np.testing.assert_allclose(doc["p"], [0, 0, np.pi], atol=1e-10)
    assert doc["H0"] == pytest.approx(np.pi**2 / 2 + 1.0, rel=1e-12)
    assert doc["degenerate_direction"] is False
    assert doc["p_source"] == "to_omega"


def test_invariants_p_flag(circle_csv, capsys):
    assert main(["invariants", str(circle_csv), "--p", "0,0,1"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert abs(doc["phi0"]) <= 1e-12
    assert doc["p_source"] == "flag"


def test_invariants_constant(tmp_path, capsys):
    path = tmp_path / "const.csv"
    io.write_field_csv(path, make_scenario_field("tilted_constant", 16))
    assert main(["invariants", str(path)]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["degenerate_direction"] is True
    assert doc["f"] == [0.0, 0.0, 0.0]
    assert main(["invariants", str(path), "--require-restricted"]) == 4
    assert "degenerate direction" in capsys.readouterr().err


def test_invariants_malformed(tmp_path, capsys):
    path = tmp_path / "bad.csv"
    path.write_text("xi,j1,j2,j3\n0,1,0\n")
    assert main(["invariants", str(path)]) == 2


def test_invariants_bad_vector_flag(circle_csv, capsys):
    with pytest.raises(SystemExit) as info:
        main(["invariants", str(circle_csv), "--p", "1,2"])
    assert info.value.code == 2


# -- export ----------------------------------------------------------------------------------

@pytest.mark.parametrize("fmt", ["csv", "obj", "svg"])
def test_export_curve(circle_csv, tmp_path, fmt):
    out = tmp_path / f"curve.{fmt}"
    assert main(["export-curve", str(circle_csv), "--basepoint", "5,0,0", "--R0", "2", "--out", str(out), "--format", fmt]) == 0
    assert out.stat().st_size > 0
    if fmt == "csv":
        data = np.loadtxt(out, delimiter=",", skiprows=1)
        np.testing.assert_allclose(data[32, 1:], [7, 2, 0], atol=1e-12)


# -- verify -----------------------------------------------------------------------------------

def test_verify_quick(tmp_path, capsys):
    code = main(["verify", "--level", "quick", "--json", str(tmp_path / "v.json")])
    out = capsys.readouterr().out
    assert code == 0, out
    rows = [l for l in out.splitlines() if l.startswith("[")]
    assert len(rows) == 10 and all(r.startswith("[PASS]") for r in rows)
    doc = json.loads((tmp_path / "v.json").read_text())
    assert doc["passed"] is True and len(doc["results"]) == 10


def test_console_script_entry():
    out = subprocess.run([sys.executable, "-m", "filament_lab", "--help"], capture_output=True, text=True, check=True)
    for sub in ("simulate", "invariants", "verify", "export-curve"):
        assert sub in out.stdout
