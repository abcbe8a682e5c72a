"""Two-player normal-form games: payoffs, gradients and structural classes."""
from dataclasses import dataclass, field

import numpy as np

from gaspp import _kernels
from gaspp.errors import InvalidInputError, UnsupportedShapeError


def _frozen(a):
    a = np.array(a, dtype=np.float64, order="C")
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class BimatrixGame:
    """Payoff matrices ``R`` (row agent) and ``C`` (column agent), both m x n."""

    R: np.ndarray
    C: np.ndarray
    name: str = field(default="", compare=False)

    def __post_init__(self):
        R = _frozen(self.R)
        C = _frozen(self.C)
        if R.ndim != 2 or R.shape != C.shape:
            raise InvalidInputError(f"R and C must be matrices of equal shape, got {R.shape} and {C.shape}")
        if R.shape[0] < 2 or R.shape[1] < 2:
            raise InvalidInputError(f"each agent needs at least two actions, got shape {R.shape}")
        if not (np.all(np.isfinite(R)) and np.all(np.isfinite(C))):
            raise InvalidInputError("payoffs must be finite")
        object.__setattr__(self, "R", R)
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "_CT", _frozen(C.T))

    @property
    def m(self):
        return self.R.shape[0]

    @property
    def n(self):
        return self.R.shape[1]

    @property
    def shape(self):
        return self.R.shape

    @classmethod
    def zero_sum(cls, R, name=""):
        R = np.asarray(R, dtype=float)
        return cls(R, -R, name=name)


@dataclass(frozen=True)
class RewardRanges:
    delta_r: float
    delta_c: float


@dataclass(frozen=True)
class Reduced2xNParams:
    """Gradient parameters of a 2 x n game.

    ``d V_r / d alpha = beta @ u_r + b_r`` and ``d V_c / d beta = alpha * u_c + b_c``.
    """

    u_r: np.ndarray
    b_r: float
    u_c: np.ndarray
    b_c: np.ndarray


@dataclass(frozen=True)
class Reduced2x2Params:
    """Scalar gradient parameters of a 2 x 2 game.

    ``d V_r / d alpha = u_r * beta + b_r`` and ``d V_c / d beta = u_c * alpha + b_c``.
    """

    u_r: float
    b_r: float
    u_c: float
    b_c: float


@dataclass(frozen=True)
class GameClass:
    """Set of structural classes a game belongs to.

    ``antiparallel_delta`` is the positive ``delta`` with ``u_r + delta * u_c = 0``
    for 2 x n games when one exists, else None.
    """

    psd: bool
    antiparallel_delta: float | None
    two_by_two: bool

    @property
    def tags(self):
        tags = set()
        if self.psd:
            tags.add("PSD")
        if self.antiparallel_delta is not None:
            tags.add("TwoByNAntiparallel")
        if self.two_by_two:
            tags.add("TwoByTwo")
        if not tags:
            tags.add("General")
        return frozenset(tags)

    @property
    def general(self):
        return self.tags == {"General"}

    def __str__(self):
        parts = []
        for tag in ("PSD", "TwoByNAntiparallel", "TwoByTwo", "General"):
            if tag in self.tags:
                if tag == "TwoByNAntiparallel":
                    parts.append(f"TwoByNAntiparallel(delta={self.antiparallel_delta:g})")
                else:
                    parts.append(tag)
        return ", ".join(parts)


def full_strategy(x):
    """Append the implied last probability to a reduced strategy."""
    x = np.asarray(x, dtype=float)
    return np.append(x, 1.0 - x.sum())


def _check_profile(game, alpha, beta):
    alpha = np.ascontiguousarray(np.atleast_1d(alpha), dtype=np.float64)
    beta = np.ascontiguousarray(np.atleast_1d(beta), dtype=np.float64)
    if alpha.shape != (game.m - 1,) or beta.shape != (game.n - 1,):
        raise InvalidInputError(
            f"expected alpha of length {game.m - 1} and beta of length {game.n - 1}, "
            f"got {alpha.shape} and {beta.shape}"
        )
    return alpha, beta


def payoffs(game, alpha, beta):
    """Expected payoffs ``(V_r, V_c)`` at the reduced profile ``(alpha, beta)``."""
    alpha, beta = _check_profile(game, alpha, beta)
    a = full_strategy(alpha)
    b = full_strategy(beta)
    return float(a @ game.R @ b), float(a @ game.C @ b)


def gradients(game, alpha, beta):
    """Gradients of each agent's expected payoff w.r.t. its own reduced strategy.

    Entry ``i`` of the row gradient is ``(R[i] - R[-1]) @ full(beta)``; the
    column gradient is the same construction on ``C.T`` and ``alpha``.
    """
    alpha, beta = _check_profile(game, alpha, beta)
    g_alpha = np.empty(game.m - 1)
    g_beta = np.empty(game.n - 1)
    _kernels.reduced_gradient(game.R, beta, g_alpha)
    _kernels.reduced_gradient(game._CT, alpha, g_beta)
    return g_alpha, g_beta


def reward_ranges(game):
    return RewardRanges(
        delta_r=float(game.R.max() - game.R.min()),
        delta_c=float(game.C.max() - game.C.min()),
    )


def reduced_params(game):
    """Reduced gradient parameters of a 2 x n game (scalar form when n == 2)."""
    if game.m != 2:
        raise UnsupportedShapeError(f"reduced parameters need a 2 x n game, got {game.shape}")
    R, C = game.R, game.C
    if game.n == 2:
        return Reduced2x2Params(
            u_r=float(R[0, 0] + R[1, 1] - R[0, 1] - R[1, 0]),
            b_r=float(R[0, 1] - R[1, 1]),
            u_c=float(C[0, 0] + C[1, 1] - C[0, 1] - C[1, 0]),
            b_c=float(C[1, 0] - C[1, 1]),
        )
    b_r = float(R[0, -1] - R[1, -1])
    return Reduced2xNParams(
        u_r=R[0, :-1] - R[1, :-1] - b_r,
        b_r=b_r,
        u_c=C[0, :-1] - C[1, :-1] - (C[0, -1] - C[1, -1]),
        b_c=C[1, :-1] - C[1, -1],
    )


def coupling_matrix(M):
    """Bilinear part of ``full(a)^T M full(b)`` in reduced coordinates.

    Entry (i, j) is ``M[i, j] - M[i, -1] - M[-1, j] + M[-1, -1]``.
    """
    M = np.asarray(M, dtype=float)
    return M[:-1, :-1] - M[:-1, -1:] - M[-1:, :-1] + M[-1, -1]


def psd_gap(game, alpha1, beta1, alpha2, beta2):
    """Left minus right side of the PSD inequality for two profiles.

    Nonnegative for every pair of profiles iff the game is PSD.
    """
    def s(a, b):
        vr, vc = payoffs(game, a, b)
        return vr + vc

    return s(alpha1, beta1) + s(alpha2, beta2) - s(alpha1, beta2) - s(alpha2, beta1)


def _antiparallel_delta(u_r, u_c):
    u_r = np.atleast_1d(np.asarray(u_r, dtype=float))
    u_c = np.atleast_1d(np.asarray(u_c, dtype=float))
    scale = np.abs(u_r).sum() + np.abs(u_c).sum()
    if scale == 0.0:
        return 1.0
    tol = 1e-9 * scale
    nz = np.flatnonzero(np.abs(u_c) > tol)
    if nz.size == 0:
        return None
    delta = -u_r[nz[0]] / u_c[nz[0]]
    if delta <= 0.0:
        return None
    if np.max(np.abs(u_r + delta * u_c)) > tol:
        return None
    return float(delta)


def classify(game):
    """Structural classes of ``game``; see :class:`GameClass`.

    PSD is decided exactly: the PSD inequality's left-minus-right side equals
    ``d_alpha^T M d_beta`` with ``M`` the reduced coupling of ``R + C``, and
    since profile differences fill a neighbourhood of zero in both
    arguments, it is nonnegative for all pairs iff ``M == 0``.
    """
    rr = reward_ranges(game)
    M = coupling_matrix(game.R + game.C)
    psd = bool(np.max(np.abs(M)) <= 1e-9 * max(rr.delta_r + rr.delta_c, 1.0))
    delta = None
    if game.m == 2:
        p = reduced_params(game)
        delta = _antiparallel_delta(p.u_r, p.u_c)
    return GameClass(psd=psd, antiparallel_delta=delta, two_by_two=game.shape == (2, 2))
