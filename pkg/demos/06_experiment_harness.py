"""
Experiment configs, artifacts and figure suites
===============================================

A JSON config names a game, the learners and the start. Each run writes
``trajectory.csv`` and ``summary.json``. The same runs are available on the
command line as ``gaspp run`` and ``gaspp reproduce``.
"""
import json
import tempfile
from pathlib import Path

from gaspp.config import load_config
from gaspp.experiments import read_trajectory_csv, reproduce_paper, run_experiment

out = Path(tempfile.mkdtemp(prefix="gaspp_demo_"))
cfg_path = out / "rps.json"
cfg_path.write_text(json.dumps({
    "game": "rock_paper_scissors",
    "learners": {"algorithm": "GASPP", "eta": 0.001, "gamma0": 0.1},
    "initial": [[0.7, 0.3], [0.3, 0.7]],
    "record_stride": 500,
    "output": "rps_run",
}))

# %% one experiment
result = run_experiment(load_config(cfg_path))
print(json.dumps({k: result.document[k] for k in ("converged", "iterations", "exploitability")}))
rows = read_trajectory_csv(result.csv_path)
print("recorded steps for the row agent:", len(rows[0]["k"]))

# %% a whole figure suite with its pass/fail table
print(reproduce_paper("fig2", out_dir=out).table())
