import json
import os
import subprocess
from pathlib import Path

import pytest

CLI = os.environ.get("HEISFLOW_CLI", str(Path(__file__).resolve().parents[2] / "build" / "heisflow"))
SMALL = ["--grid.k_max", "2", "--grid.n_sigma", "64", "--grid.sigma_max", "16"]
HARDY = ["--hardy.spacing", "0.0625", "--hardy.points", "480"]


def run(*args, env=None):
    full = dict(os.environ)
    full.pop("HEISFLOW_WORKERS", None)
    full.update(env or {})
    return subprocess.run([CLI, *map(str, args)], capture_output=True, text=True, env=full)


def manifest(out):
    return json.loads((Path(out) / "manifest.json").read_text())


def test_oracle_check(tmp_path):
    r = run("oracle-check", "--out", tmp_path)
    assert r.returncode == 0, r.stderr
    m = manifest(tmp_path)
    assert m["status"] == "pass"
    assert len(m["checks"]) == 7 and all(c["pass"] for c in m["checks"])
    assert m["tolerances"]["bruteforce"] == {"value": 0.01, "source": "default"}
    assert all((tmp_path / f).exists() for f in m["files"])


def test_failing_tolerance_exits_one(tmp_path):
    r = run("oracle-check", "--checks.gap", "1e-12", "--out", tmp_path)
    assert r.returncode == 1
    m = manifest(tmp_path)
    assert m["status"] == "check_failed"
    assert m["tolerances"]["gap"] == {"value": 1e-12, "source": "flag"}


@pytest.mark.parametrize(
    "args",
    [
        ["groundstate", "--groundstate.betas", ""],
        ["groundstate", "--groundstate.betas", "0.95,0.9"],
        ["groundstate", "--bogus", "1"],
        ["evolve-limit", "--evolve.dt", "-1"],
        ["evolve-heis", "--evolve.beta", "0.9", "--evolve.gammas", "0.5"],
        ["stability-sweep", "--stability.flow", "other"],
        ["distance"],
    ],
)
def test_config_errors_exit_two(tmp_path, args):
    r = run(*args, "--out", tmp_path)
    assert r.returncode == 2, r.stdout + r.stderr


def test_config_file_and_flag_precedence(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# limit flow\n[evolve]\nt_final = 0.2\ndt = 0.01\nsample_every = 5\n[hardy]\nspacing = 0.0625\npoints = 480\n")
    r = run("evolve-limit", "--config", cfg, "--evolve.dt", "0.02", "--out", tmp_path / "o")
    assert r.returncode == 0, r.stderr
    m = manifest(tmp_path / "o")
    assert m["config"]["evolve"]["dt"] == "0.02"
    assert m["config"]["evolve"]["t_final"] == "0.2"
    assert m["config_sources"]["evolve.dt"] == "flag"
    assert m["config_sources"]["evolve.t_final"] == "file"

    bad = tmp_path / "bad.cfg"
    bad.write_text("[evolve]\nnot_a_key = 1\n")
    assert run("evolve-limit", "--config", bad, "--out", tmp_path / "b").returncode == 2


def test_numerical_failure_exits_three(tmp_path):
    r = run("evolve-limit", *HARDY, "--evolve.dt", "0.5", "--evolve.t_final", "20",
            "--evolve.perturbation", "1", "--out", tmp_path)
    assert r.returncode == 3
    m = manifest(tmp_path)
    assert m["status"] == "numerical_error"
    assert m["failed_check"] == "evolve"


def test_worker_env_and_determinism(tmp_path):
    args = ["evolve-limit", *HARDY, "--evolve.t_final", "0.5", "--evolve.dt", "0.01", "--evolve.sample_every", "10",
            "--evolve.perturbation", "0.01", "--evolve.tube", "0.1"]
    a = run(*args, "--out", tmp_path / "a", env={"HEISFLOW_WORKERS": "2"})
    b = run(*args, "--out", tmp_path / "b")
    assert a.returncode == 0 and b.returncode == 0
    assert manifest(tmp_path / "a")["workers"] == 2
    assert manifest(tmp_path / "a")["config_sources"]["run.workers"] == "env"
    assert (tmp_path / "a" / "series.csv").read_bytes() == (tmp_path / "b" / "series.csv").read_bytes()
    header = (tmp_path / "a" / "series.csv").read_text().splitlines()[0]
    assert header == "t,momentum,energy,l4,w_norm,uplus_norm,dt_norm,dist_orbit,x_s,x_theta,x_alpha,anchor_id"


def test_groundstate_then_distance(tmp_path):
    r = run("groundstate", *SMALL, "--groundstate.betas", "0.9", "--out", tmp_path / "gs")
    assert r.returncode == 0, r.stderr
    rows = (tmp_path / "gs" / "groundstates.csv").read_text().splitlines()
    assert len(rows) == 2 and rows[1].startswith("0.9,")
    profile = tmp_path / "gs" / "profiles" / "qbeta_000.csv"
    assert profile.exists()
    r = run("distance", "--distance.input", profile, "--out", tmp_path / "d")
    assert r.returncode == 0, r.stderr
    d = manifest(tmp_path / "d")["derived"]
    assert d["kind"] == "radial"
    assert d["distance"] == pytest.approx((d["w_norm"] ** 2 + 3.141592653589793 * d["plus_distance_hardy"] ** 2) ** 0.5)


def test_evolve_heis_gamma_list(tmp_path):
    r = run("evolve-heis", "--grid.k_max", "2", "--grid.n_sigma", "48", "--grid.sigma_max", "12",
            "--evolve.beta", "0.5", "--evolve.gammas", "0.5,0.8", "--evolve.w_size", "0.05",
            "--evolve.t_final", "0.2", "--evolve.dt", "0.01", "--evolve.sample_every", "5", "--out", tmp_path)
    assert r.returncode == 0, r.stderr
    m = manifest(tmp_path)
    assert [run_["gamma"] for run_ in m["derived"]["runs"]] == [0.5, 0.8]
    assert (tmp_path / "series_gamma_001.csv").exists()


def test_stability_sweep_heis(tmp_path):
    r = run("stability-sweep", *SMALL, "--stability.r", "0.03", "--stability.beta", "0.99", "--out", tmp_path)
    assert r.returncode == 0, r.stderr
    m = manifest(tmp_path)
    point = m["derived"]["points"][0]
    assert point["sup_distance"] <= 3 * 0.03
    assert (tmp_path / "stability.csv").exists() and (tmp_path / "series_r_000.csv").exists()
