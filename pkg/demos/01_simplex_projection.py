"""
Projection onto the reduced simplex
===================================

Strategies are stored in reduced form: the first k-1 probabilities of a
k-action mixed strategy. The feasible set is {x >= 0, sum(x) <= 1}.
"""
import numpy as np

from gaspp.geometry import contains, project, projected_gradient

# %% points outside the set land on the nearest face
for x in ([0.5, 0.3], [1.2, 0.4], [-0.2, 0.4], [3.0, 3.0]):
    print(x, "->", project(x))

# %% feasible points are returned unchanged, bit for bit
x = np.array([0.2, 0.3])
print("fixed point:", np.array_equal(project(x), x), contains(x))

# %% the projected gradient is the direction the projected step takes at x
print("vertex (1, 0), push outwards:", projected_gradient([1.0, 0.0], [1.0, 1.0]))
print("interior, any push:", projected_gradient([0.2, 0.3], [1.0, -2.0]))
