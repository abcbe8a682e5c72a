import json
import os
from types import SimpleNamespace

import numpy as np
import pytest

from gaspp.config import config_from_dict
from gaspp.experiments import (
    CSV_HEADER,
    atomic_write,
    oscillation_amplitude,
    read_trajectory_csv,
    reproduce_paper,
    run_experiment,
    suite_configs,
)
from gaspp.errors import InvalidInputError


def test_prisoners_dilemma_experiment(tmp_path):
    cfg = config_from_dict({"game": "prisoners_dilemma", "initial": [[0.7], [0.3]], "output": str(tmp_path)})
    res = run_experiment(cfg)
    assert res.status == 0
    doc = json.loads(res.json_path.read_text())
    assert doc["converged"] and doc["exploitability"] <= 1e-6
    assert doc["final_strategies"] == [[0.0, 1.0], [0.0, 1.0]]
    assert doc["classification"]["tags"] == ["PSD", "TwoByNAntiparallel", "TwoByTwo"]
    assert doc["conditions"][0]["condition2"] is True
    assert doc["analysis2x2"]["case"] == "Case1_Singular"
    assert doc["analysis2x2"]["prediction"] == "ConvergesFiniteSteps"
    assert res.csv_path.read_text().splitlines()[0] == ",".join(CSV_HEADER)


def test_shapley_experiment_reaches_uniform(tmp_path):
    cfg = config_from_dict({
        "game": "shapleys_game", "learners": {"eta": 0.001, "gamma0": 3},
        "initial": [[0.1, 0.8], [0.8, 0.1]], "allow_condition_override": True,
    })
    res = run_experiment(cfg, out_dir=tmp_path)
    assert res.summary.converged
    np.testing.assert_allclose(np.concatenate(res.summary.final), 1 / 3, atol=1e-2)
    doc = json.loads((tmp_path / "summary.json").read_text())
    assert doc["classification"]["tags"] == ["General"] and doc["analysis2x2"] is None


def test_default_output_root_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("GASPP_OUT_DIR", str(tmp_path / "root"))
    res = run_experiment(config_from_dict({"game": "chicken", "max_iters": 50}))
    assert res.directory == tmp_path / "root" / "chicken"
    assert res.csv_path.exists() and res.json_path.exists()


@pytest.mark.parametrize("doc", [
    {"game": "rock_paper_scissors", "initial": [[0.7, 0.3], [0.3, 0.7]], "max_iters": 3000, "record_stride": 1},
    {"game": "shapleys_game", "learners": [{"algorithm": "GIGAWOLF", "eta": 0.01},
                                           {"algorithm": "IGAPP", "eta": 0.01, "gamma0": 0.1}],
     "max_iters": 2000, "record_stride": 3},
    {"game": "three_player_matching_pennies", "learners": {"eta": 0.01, "gamma0": 0.3},
     "initial": [[0.1], [0.4], [0.7]], "max_iters": 2000, "record_stride": 1},
])
def test_csv_round_trip_is_bit_exact(tmp_path, doc):
    res = run_experiment(config_from_dict(doc), out_dir=tmp_path)
    back = read_trajectory_csv(res.csv_path)
    traj = res.trajectory
    assert sorted(back) == list(range(len(traj.strategies)))
    for i, strat in enumerate(traj.strategies):
        d = strat.shape[1]
        assert np.array_equal(back[i]["k"], traj.k)
        assert np.array_equal(back[i]["prob"][:, :d], strat)
        assert np.array_equal(back[i]["grad"], traj.gradients[i])
        np.testing.assert_allclose(back[i]["prob"].sum(axis=1), 1.0, atol=1e-12)
        if not np.all(np.isnan(traj.predictions[i])):
            assert np.array_equal(back[i]["pred_prob"][:, :d], traj.predictions[i])


def test_csv_marks_missing_values(tmp_path):
    doc = {"game": "chicken", "learners": {"algorithm": "GA", "eta": 0.01}, "max_iters": 10, "record_stride": 1}
    res = run_experiment(config_from_dict(doc), out_dir=tmp_path)
    first, last = (line.split(",") for line in res.csv_path.read_text().splitlines()[1:3])
    assert first[4] == "" and first[6] == "" and first[5] != ""
    assert last[5] == ""
    back = read_trajectory_csv(res.csv_path)
    assert np.all(np.isnan(back[0]["pred_prob"])) and np.all(np.isnan(back[0]["gamma_k"]))


def test_read_rejects_foreign_csv(tmp_path):
    path = tmp_path / "x.csv"
    path.write_text("a,b\n1,2\n")
    with pytest.raises(InvalidInputError):
        read_trajectory_csv(path)


def test_atomic_write_leaves_no_temporaries(tmp_path):
    target = tmp_path / "sub" / "file.txt"
    atomic_write(target, "one\n")
    atomic_write(target, "two\n")
    assert target.read_text() == "two\n"
    assert os.listdir(target.parent) == ["file.txt"]


def test_suite_definitions():
    assert len(suite_configs("fig2")) == 8
    assert [n for n, _ in suite_configs("fig3")] == [
        "shapleys_game_gaspp", "shapleys_game_gigawolf", "shapleys_game_igapp"]
    assert len(suite_configs("fig4")) == 4
    (name, cfg), = suite_configs("fig5")
    assert cfg.tol_converge == 1e-6 and cfg.max_iters == 1_000_000
    np.testing.assert_array_equal(np.concatenate(cfg.initial), [0.1, 0.4, 0.7])
    rps = dict(suite_configs("fig2"))["rock_paper_scissors_a"]
    np.testing.assert_array_equal(rps.initial[0], [0.7, 0.3])
    with pytest.raises(InvalidInputError):
        suite_configs("fig9")


def test_reproduce_is_byte_identical(tmp_path):
    r1 = reproduce_paper("fig2", out_dir=tmp_path / "a")
    r2 = reproduce_paper("fig2", out_dir=tmp_path / "b")
    assert r1.passed and r2.passed
    for name in r1.results:
        a = (tmp_path / "a" / "fig2" / name / "trajectory.csv").read_bytes()
        b = (tmp_path / "b" / "fig2" / name / "trajectory.csv").read_bytes()
        assert a == b
    report = json.loads((tmp_path / "a" / "fig2" / "report.json").read_text())
    assert report["passed"] and len(report["checks"]) == len(r1.checks)
    assert "PASS" in r1.table().splitlines()[0]


def test_reproduce_respects_iteration_budget(tmp_path):
    report = reproduce_paper("fig2", out_dir=tmp_path, max_iters=10)
    assert not report.passed
    assert any(not c.passed for c in report.checks)


def test_oscillation_amplitude():
    k = np.arange(0, 1000, 10)
    traj = SimpleNamespace(k=k, strategies=[(0.5 + 0.2 * np.sin(k / 50.0))[:, None]])
    summary = SimpleNamespace(iterations=1000)
    assert oscillation_amplitude(traj, summary, last=1000) == pytest.approx(0.4, abs=0.01)
    assert oscillation_amplitude(traj, summary, last=5) == 0.0
