"""The reduced strategy polytope {x : x >= 0, sum(x) <= 1} and projections onto it.

A mixed strategy over ``k`` actions is represented by its first ``k - 1``
probabilities; the last one is implied. Projections are taken in these
reduced coordinates.
"""
from dataclasses import dataclass

import numpy as np

from gaspp import _kernels
from gaspp.errors import InvalidInputError

FEASIBILITY_TOL = 1e-12


@dataclass(frozen=True)
class SimplexSet:
    """Reduced simplex of dimension ``dim`` (a game player with ``dim + 1`` actions)."""

    dim: int

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 1:
            raise InvalidInputError(f"dim must be a positive integer, got {self.dim!r}")

    def project(self, x):
        x = _as_vector(x)
        if x.shape[0] != self.dim:
            raise InvalidInputError(f"expected length {self.dim}, got {x.shape[0]}")
        return project(x)

    def contains(self, x):
        x = np.asarray(x, dtype=float)
        return x.shape == (self.dim,) and contains(x)


def _as_vector(x):
    x = np.ascontiguousarray(x, dtype=np.float64)
    if x.ndim != 1 or x.shape[0] < 1:
        raise InvalidInputError(f"expected a non-empty vector, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise InvalidInputError("vector has non-finite entries")
    return x


def project(x):
    """Euclidean projection of ``x`` onto the reduced simplex.

    Points already inside are returned unchanged. Otherwise the vector is
    clamped to the nonnegative orthant and, if the clamped sum exceeds one,
    projected onto the face ``sum(x) = 1`` by sort-and-threshold.

    Example:
        >>> project([0.8, 0.5])
        array([0.65, 0.35])
    """
    x = _as_vector(x)
    out = np.empty_like(x)
    _kernels.project_into(x, out)
    return out


def contains(x, tol=FEASIBILITY_TOL):
    """True iff every coordinate is >= -tol and the sum is <= 1 + tol."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or not np.all(np.isfinite(x)):
        return False
    return bool(np.all(x >= -tol) and x.sum() <= 1.0 + tol)


def projected_gradient(x, v, tol=FEASIBILITY_TOL):
    """Project direction ``v`` onto the tangent cone of the simplex at ``x``.

    This is the limit of ``(project(x + eps * v) - x) / eps`` as eps -> 0.
    Coordinates with ``x_i == 0`` may not decrease, and when ``sum(x) == 1``
    the direction may not increase the sum (both up to ``tol``).
    """
    x = _as_vector(x)
    v = _as_vector(v)
    if v.shape != x.shape:
        raise InvalidInputError(f"shape mismatch: x {x.shape}, v {v.shape}")
    if not contains(x, tol):
        raise InvalidInputError("x is outside the simplex")

    at_zero = x <= tol
    if x.sum() < 1.0 - tol:
        return np.where(at_zero, np.maximum(v, 0.0), v)

    # Sum face active. KKT: d_i = v_i - nu off the zero set and
    # d_i = max(v_i - nu, 0) on it, with nu >= 0 chosen so sum(d) <= 0.
    def clipped(nu):
        return np.where(at_zero, np.maximum(v - nu, 0.0), v - nu)

    d = clipped(0.0)
    if d.sum() <= 0.0:
        return d
    # sum(d(nu)) is piecewise linear and strictly decreasing; walk the
    # breakpoints of the zero-set coordinates from the top down.
    free = v[~at_zero]
    bounded = np.sort(v[at_zero])[::-1]
    total = free.sum()
    count = free.size
    nu = total / count
    for val in bounded:
        if val <= nu:
            break
        total += val
        count += 1
        nu = total / count
    return clipped(nu)
