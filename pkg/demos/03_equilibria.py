"""
Nash equilibria by support enumeration
======================================
"""
from gaspp.equilibrium import enumerate_ne, exploitability, projected_gradient_test
from gaspp.game import full_strategy
from gaspp.registry import BATTLE_OF_SEXES, SHAPLEYS_GAME

# %% Battle of the Sexes has two pure equilibria and one mixed
for a, b in enumerate_ne(BATTLE_OF_SEXES):
    print(full_strategy(a), full_strategy(b), "exploitability", exploitability(BATTLE_OF_SEXES, a, b))

# %% Shapley's game has only the uniform equilibrium
((a, b),) = enumerate_ne(SHAPLEYS_GAME)
print("Shapley:", full_strategy(a), full_strategy(b))

# %% a certificate: small projected gradients and small exploitability
print(projected_gradient_test(SHAPLEYS_GAME, a, b, 1e-9))
print(projected_gradient_test(SHAPLEYS_GAME, [0.5, 0.2], b, 1e-9).passes)
