import json
import os
import subprocess

import pytest

import fracwell


def test_potential_values():
    w = fracwell.Potential()
    assert w.value(0.0) == pytest.approx(5.0 / 16.0)
    assert w.value(1.0) == 0.0
    assert w.slope(-1.0) == 0.0


def test_grid_and_weights():
    pts = fracwell.grid_points(1, 4, 1)
    assert [p[0] for p in pts] == [-1.5, -0.5, 0.5, 1.5]
    w = fracwell.exterior_weights(1, 2, 1, 0.5)
    assert w[0] == pytest.approx(2.0 + 2.0 / 3.0)


def test_minimize_constant_case():
    f = fracwell.Functional(1, 16, theta=0.0, exterior=1.0)
    r = f.minimize()
    assert r["converged"]
    assert r["energy"]["total"] == pytest.approx(0.0, abs=1e-12)
    assert all(v == pytest.approx(1.0) for v in r["values"])


def test_gradient_is_consistent():
    f = fracwell.Functional(2, 4, s=0.25, seed=3)
    v = [0.1 * i - 0.5 for i in range(f.size)]
    g = f.gradient(v)
    h = 1e-6
    for i in (0, 7, 15):
        p = list(v)
        m = list(v)
        p[i] += h
        m[i] -= h
        fd = (f.energy(p)["total"] - f.energy(m)["total"]) / (2 * h)
        assert g[i] == pytest.approx(fd, rel=1e-6, abs=1e-8)


def test_extremal_pair_is_ordered():
    f = fracwell.Functional(1, 32, s=0.75, seed=5)
    e = f.extremal_pair(1.0 + 3.0 ** 0.5)
    assert e["ordering_violation"] == 0.0
    assert all(a >= b for a, b in zip(e["plus"]["values"], e["minus"]["values"]))


def test_run_experiment_and_config_errors():
    out = fracwell.run_experiment({"experiment": "extremal", "n": "16", "R": "3", "jobs": "2"})
    assert out["stem"] == "extremal_1d_s0.75_theta1_n16"
    assert out["failures"] == 0
    assert len(out["realizations"]["delta_energy"]) == 3
    with pytest.raises(fracwell.ConfigError, match="^s:"):
        fracwell.run_experiment({"experiment": "minimize", "s": "1.2"})


@pytest.mark.skipif("FRACWELL_CLI" not in os.environ, reason="command-line tool not located")
def test_cli_outputs(tmp_path):
    cli = os.environ["FRACWELL_CLI"]
    cfg = tmp_path / "run.cfg"
    cfg.write_text("experiment = minimize\nd = 1\ns = 0.5\ntheta = 1\nn = 64\nseed = 7\n")
    out = tmp_path / "out"
    r = subprocess.run([cli, "run", "--config", str(cfg), "--out", str(out), "--theta=0"], capture_output=True)
    assert r.returncode == 0, r.stderr
    stem = "minimize_1d_s0.5_theta0_n64"
    manifest = json.loads((out / f"{stem}.json").read_text())
    assert manifest["seed"] == 7
    assert manifest["status"] == "ok"
    rows = (out / f"{stem}.csv").read_text().splitlines()
    assert rows[0].startswith("n,energy,")
    assert float(rows[1].split(",")[1]) == 0.0

    again = subprocess.run([cli, "run", "--config", str(cfg), "--out", str(out), "--theta=0"], capture_output=True)
    assert again.returncode == 2

    bad = subprocess.run([cli, "minimize", "--s=1.2", "--out", str(out)], capture_output=True)
    assert bad.returncode == 2
    assert b"s:" in bad.stderr

    blocked = tmp_path / "file"
    blocked.write_text("")
    r = subprocess.run([cli, "minimize", "--out", str(blocked / "sub")], capture_output=True)
    assert r.returncode == 2

    r = subprocess.run(
        [cli, "extremal", "--n=16", "--R=4", "--max_iter=1", "--out", str(tmp_path / "starved")], capture_output=True
    )
    assert r.returncode == 1
    m = json.loads(next((tmp_path / "starved").glob("*.json")).read_text())
    assert m["failures"] == 8
