import json
import subprocess
import sys

import pytest

from gaspp.cli import FAILED, OK, USAGE, main


def test_classify(capsys):
    assert main(["classify", "rock_paper_scissors"]) == OK
    assert "PSD" in capsys.readouterr().out
    assert main(["classify", "three_player_matching_pennies"]) == OK
    assert capsys.readouterr().out.strip() == "General"


def test_ne_lists_the_prisoners_dilemma_equilibrium(capsys):
    assert main(["ne", "prisoners_dilemma"]) == OK
    out = capsys.readouterr().out.strip().splitlines()
    assert out == ["row (0, 1)  column (0, 1)"]


def test_ne_refuses_three_players(capsys):
    assert main(["ne", "three_player_matching_pennies"]) == USAGE
    assert "two-player" in capsys.readouterr().err


def test_analyze2x2(capsys):
    assert main(["analyze2x2", "battle_of_sexes", "--gamma", "0.1", "--initial", "0.9", "0.9"]) == OK
    out = capsys.readouterr().out
    assert "center: (0.75, 0.25)" in out and "prediction: Corner at (1, 1)" in out
    assert main(["analyze2x2", "shapleys_game", "--gamma", "0.1"]) == USAGE


def test_check_conditions(capsys):
    assert main(["check-conditions", "prisoners_dilemma", "--eta", "0.001", "--gamma0", "0.1"]) == OK
    assert main(["check-conditions", "shapleys_game", "--eta", "0.001", "--gamma0", "3"]) == FAILED
    assert "condition2: violated" in capsys.readouterr().out


def test_run_writes_artifacts(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"game": "chicken", "initial": [[0.7], [0.3]], "output": "from_config"}))
    assert main(["run", str(cfg), "--out-dir", str(tmp_path / "out"), "--max-iters", "20000"]) == OK
    assert "converged" in capsys.readouterr().out
    assert (tmp_path / "out" / "trajectory.csv").exists()
    assert (tmp_path / "out" / "summary.json").exists()
    assert not (tmp_path / "from_config").exists()


def test_run_reports_config_errors(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text('{"game": "chicken",\n "max_iters": }')
    assert main(["run", str(cfg)]) == USAGE
    assert "line 2" in capsys.readouterr().err
    cfg.write_text(json.dumps({"game": "chicken", "window": -3}))
    assert main(["run", str(cfg)]) == USAGE
    assert "field window" in capsys.readouterr().err
    assert main(["run", str(tmp_path / "missing.json")]) == USAGE


def test_reproduce_exit_status(tmp_path, capsys):
    assert main(["--quiet", "reproduce", "fig2", "--out-dir", str(tmp_path)]) == OK
    assert capsys.readouterr().out == ""
    assert main(["reproduce", "fig2", "--out-dir", str(tmp_path), "--max-iters", "10"]) == FAILED
    assert "FAIL" in capsys.readouterr().out


def test_unknown_subcommand_is_a_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == USAGE


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "gaspp", "classify", "prisoners_dilemma"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == OK
    assert "TwoByTwo" in proc.stdout
