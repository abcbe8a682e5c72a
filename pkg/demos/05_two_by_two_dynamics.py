"""
Closed-form dynamics of two-action games
========================================

In a 2x2 game the joint update is linear away from the boundary. The
eigenvalues of its matrix say whether the dynamics spiral into the
equilibrium or run to a corner, and the eigen-coordinates F and G say which.
"""
import numpy as np

from gaspp.analysis2x2 import analyze, eigencoords, predict_outcome
from gaspp.game import BimatrixGame
from gaspp.learners import LearnerConfig, StepSizes, run
from gaspp.registry import BATTLE_OF_SEXES, CHICKEN, PRISONERS_DILEMMA

games = {
    "prisoners_dilemma": PRISONERS_DILEMMA,
    "matching_pennies": BimatrixGame.zero_sum([[1, -1], [-1, 1]]),
    "battle_of_sexes": BATTLE_OF_SEXES,
    "chicken": CHICKEN,
}

# %%
start = (0.9, 0.6)
for name, game in games.items():
    dyn = analyze(game, 0.1)
    pred = predict_outcome(dyn, start)
    _, summary = run(game, LearnerConfig("GASPP", StepSizes(0.001, 0.1)), ([start[0]], [start[1]]), 200_000)
    final = np.round([summary.final[0][0], summary.final[1][0]], 4)
    print(f"{name:18s} {dyn.case.value:16s} predicted {pred.tag:20s} simulated {final}")

# %% eigen-coordinates of the start in Battle of the Sexes
print(eigencoords(analyze(BATTLE_OF_SEXES, 0.1), *start))
