"""
Gradient learners with and without policy prediction
====================================================

Plain gradient ascent cycles in Shapley's game. Forecasting the opponent's
next strategy and responding to the forecast brings both agents to the
uniform equilibrium. GIGA-WoLF keeps cycling.
"""
import numpy as np

from gaspp.experiments import oscillation_amplitude
from gaspp.game import full_strategy
from gaspp.learners import LearnerConfig, StepSizes, run, validate_conditions
from gaspp.registry import SHAPLEYS_GAME

initial = ([0.1, 0.8], [0.8, 0.1])
learners = {
    "GA": LearnerConfig("GA", StepSizes(0.001)),
    "GASPP": LearnerConfig("GASPP", StepSizes(0.001, 3.0)),
    "GIGAWOLF": LearnerConfig("GIGAWOLF", StepSizes(0.001)),
}

# %% gamma0 = 3 is outside the guaranteed range, which the report flags
print(validate_conditions(SHAPLEYS_GAME, StepSizes(0.001, 3.0)))

# %%
for name, cfg in learners.items():
    traj, summary = run(SHAPLEYS_GAME, cfg, initial, 300_000, record_stride=1000)
    print(f"{name:9s} {summary.stop_reason:10s} after {summary.iterations:7d} steps, exploitability {summary.exploitability:.3g}"
          f"  final row {np.round(full_strategy(summary.final[0]), 3)}"
          f"  spread over the last 1e5 steps {oscillation_amplitude(traj, summary):.3f}")
