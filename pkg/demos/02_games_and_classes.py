"""
Bimatrix games, gradients and structural classes
================================================
"""
from gaspp.game import classify, gradients, payoffs, reduced_params, reward_ranges
from gaspp.registry import BENCHMARKS, PRISONERS_DILEMMA

# %% expected payoffs and reduced gradients at a mixed profile
a, b = [0.3], [0.6]
print("payoffs:", payoffs(PRISONERS_DILEMMA, a, b))
print("gradients:", gradients(PRISONERS_DILEMMA, a, b))
print("2x2 parameters:", reduced_params(PRISONERS_DILEMMA))
print("reward ranges:", reward_ranges(PRISONERS_DILEMMA))

# %% which convergence guarantees apply to each benchmark
for name, entry in BENCHMARKS.items():
    if hasattr(entry.game, "R"):
        print(f"{name:32s} {classify(entry.game)}")
