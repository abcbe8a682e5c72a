"""Nash equilibrium checks and a support-enumeration oracle for small bimatrix games."""
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from gaspp.errors import UnsupportedShapeError
from gaspp.game import _check_profile, full_strategy, gradients, reward_ranges
from gaspp.geometry import projected_gradient

MAX_ENUM_ACTIONS = 5


@dataclass(frozen=True)
class NeCertificate:
    alpha: np.ndarray
    beta: np.ndarray
    exploitability: float
    projected_gradient_norms: tuple
    passes: bool


def exploitability(game, alpha, beta):
    """Largest gain either agent gets from a unilateral deviation.

    Pure deviations suffice because each payoff is linear in the deviating
    agent's own strategy.
    """
    alpha, beta = _check_profile(game, alpha, beta)
    a = full_strategy(alpha)
    b = full_strategy(beta)
    row_values = game.R @ b
    col_values = a @ game.C
    gain_r = row_values.max() - a @ row_values
    gain_c = col_values.max() - col_values @ b
    return float(max(gain_r, gain_c, 0.0))


def projected_gradient_test(game, alpha, beta, tol):
    """Certify ``(alpha, beta)`` as an approximate Nash equilibrium.

    Passes iff both projected-gradient norms are at most ``tol`` and the
    exploitability is at most ``tol * (delta_r + delta_c + 1)``.
    """
    alpha, beta = _check_profile(game, alpha, beta)
    g_a, g_b = gradients(game, alpha, beta)
    norms = (
        float(np.linalg.norm(projected_gradient(alpha, g_a))),
        float(np.linalg.norm(projected_gradient(beta, g_b))),
    )
    expl = exploitability(game, alpha, beta)
    rr = reward_ranges(game)
    passes = max(norms) <= tol and expl <= tol * (rr.delta_r + rr.delta_c + 1.0)
    return NeCertificate(alpha, beta, expl, norms, bool(passes))


def _indifference(M, rows, cols):
    """Mix over ``cols`` making every action in ``rows`` equally good under ``M``.

    Returns None if the square system is singular.
    """
    k = len(rows)
    A = np.zeros((k + 1, k + 1))
    A[:k, :k] = M[np.ix_(rows, cols)]
    A[:k, k] = -1.0
    A[k, :k] = 1.0
    rhs = np.zeros(k + 1)
    rhs[k] = 1.0
    if np.linalg.cond(A) > 1e12:
        return None
    sol = np.linalg.solve(A, rhs)
    return sol[:k]


def _mixed(size, support, weights):
    x = np.zeros(size)
    x[list(support)] = weights
    return x


def enumerate_ne(game, tol=1e-9, return_degenerate=False):
    """All Nash equilibria found by support enumeration over equal-size supports.

    Returns a list of ``(alpha, beta)`` reduced profiles ordered by support
    size then lexicographically by support. Support pairs whose indifference
    system is singular are skipped; with ``return_degenerate=True`` they are
    returned as a second value ``[(row_support, col_support), ...]``.
    """
    m, n = game.shape
    if m > MAX_ENUM_ACTIONS or n > MAX_ENUM_ACTIONS:
        raise UnsupportedShapeError(f"support enumeration is limited to {MAX_ENUM_ACTIONS} actions per agent")
    R, C = game.R, game.C
    found = []
    degenerate = []
    for k in range(1, min(m, n) + 1):
        for I in combinations(range(m), k):
            for J in combinations(range(n), k):
                y = _indifference(R, I, J)
                x = _indifference(C.T, J, I)
                if x is None or y is None:
                    degenerate.append((I, J))
                    continue
                if np.any(x < -tol) or np.any(y < -tol):
                    continue
                x = np.clip(x, 0.0, None)
                y = np.clip(y, 0.0, None)
                a = _mixed(m, I, x / x.sum())
                b = _mixed(n, J, y / y.sum())
                row_values = R @ b
                col_values = a @ C
                if row_values.max() > a @ row_values + tol:
                    continue
                if col_values.max() > col_values @ b + tol:
                    continue
                if any(np.allclose(a, fa, atol=1e-9) and np.allclose(b, fb, atol=1e-9) for fa, fb in found):
                    continue
                found.append((a, b))
    result = [(a[:-1].copy(), b[:-1].copy()) for a, b in found]
    if return_degenerate:
        return result, degenerate
    return result
