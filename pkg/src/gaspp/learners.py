"""Gradient learners for normal-form games.

Four update rules share one interface:

* ``GA``: projected gradient ascent on the current opponent strategy.
* ``GASPP``: gradient ascent with shrinking policy prediction. Each agent
  forecasts the opponent one prediction step ahead (projected back onto the
  simplex), responds to the forecast, and the shared prediction length is
  multiplied by ``mu`` whenever the strategies stall while the forecasts
  still move. The run terminates once the forecasts equal the strategies.
* ``IGAPP``: like GASPP but the forecast is not projected and the
  prediction length never shrinks.
* ``GIGAWOLF``: gradient step blended toward a slow baseline strategy.

The per-step functions (:func:`gaspp_step` etc.) and the run loops call the
same compiled kernels, so a trajectory from :func:`run` is reproduced
exactly by iterating :func:`step`.
"""
import enum
import math
from dataclasses import dataclass, field

import numpy as np

from gaspp import _kernels
from gaspp.equilibrium import exploitability
from gaspp.errors import InvalidInputError, InvalidStateError
from gaspp.game import BimatrixGame, reward_ranges
from gaspp.geometry import contains

DEFAULT_MU = 0.5
DEFAULT_TOL = 1e-10
DEFAULT_WINDOW = 100
TERMINATION_TOL = 1e-12


class Algorithm(str, enum.Enum):
    GA = "GA"
    GASPP = "GASPP"
    IGAPP = "IGAPP"
    GIGAWOLF = "GIGAWOLF"

    @property
    def code(self):
        return _ALGORITHM_CODES[self]

    @property
    def predicts(self):
        return self in (Algorithm.GASPP, Algorithm.IGAPP)


_ALGORITHM_CODES = {
    Algorithm.GA: _kernels.GA,
    Algorithm.GASPP: _kernels.GASPP,
    Algorithm.IGAPP: _kernels.IGAPP,
    Algorithm.GIGAWOLF: _kernels.GIGAWOLF,
}


class StepOutcome(enum.Enum):
    CONTINUE = "Continue"
    TERMINATED = "Terminated"
    GAMMA_SHRUNK = "GammaShrunk"


_OUTCOMES = {
    _kernels.CONTINUE: StepOutcome.CONTINUE,
    _kernels.TERMINATED: StepOutcome.TERMINATED,
    _kernels.GAMMA_SHRUNK: StepOutcome.GAMMA_SHRUNK,
}

_STOP_REASONS = {
    _kernels.STOP_MAX_ITERS: "max_iters",
    _kernels.STOP_TERMINATED: "terminated",
    _kernels.STOP_WINDOW: "window",
}


@dataclass(frozen=True)
class StepSizes:
    """Gradient step ``eta``, initial prediction length ``gamma0`` and shrink factor ``mu``.

    ``gamma0`` may be None for learners that do not predict (GA, GIGA-WoLF).
    Positivity is checked by :func:`validate_conditions`, not here, so that
    an invalid setting can still be reported.
    """

    eta: float
    gamma0: float | None = None
    mu: float = DEFAULT_MU

    def __post_init__(self):
        if not math.isfinite(self.eta):
            raise InvalidInputError("eta must be finite")
        if self.gamma0 is not None and not math.isfinite(self.gamma0):
            raise InvalidInputError("gamma0 must be finite")
        if not 0.0 < self.mu < 1.0:
            raise InvalidInputError(f"mu must lie in (0, 1), got {self.mu}")


@dataclass(frozen=True)
class ConditionReport:
    """Outcome of the three step-size conditions for one game.

    ``prediction_product`` is ``4 * gamma0**2 * delta_r * delta_c`` (must be
    < 1) and ``step_bound`` is ``1 / (delta_r + delta_c)`` (``inf`` for a
    constant game), the strict upper bound on ``eta`` and ``gamma0``.
    """

    condition1: bool
    condition2: bool
    condition3: bool
    delta_r: float
    delta_c: float
    prediction_product: float
    step_bound: float

    @property
    def passed(self):
        return self.condition1 and self.condition2 and self.condition3

    @property
    def failures(self):
        return [f"condition{i}" for i, ok in enumerate(
            (self.condition1, self.condition2, self.condition3), start=1) if not ok]

    def as_dict(self):
        return {
            "condition1": self.condition1,
            "condition2": self.condition2,
            "condition3": self.condition3,
            "delta_r": self.delta_r,
            "delta_c": self.delta_c,
            "prediction_product": self.prediction_product,
            "step_bound": self.step_bound if math.isfinite(self.step_bound) else None,
        }


def validate_conditions(game, sizes):
    """Check ``sizes`` against the three convergence conditions for ``game``.

    1. ``eta > 0`` and ``gamma0 > 0``
    2. ``4 * gamma0**2 * delta_r * delta_c < 1``
    3. ``eta < 1 / (delta_r + delta_c)`` and ``gamma0 < 1 / (delta_r + delta_c)``

    A missing ``gamma0`` (non-predicting learner) only constrains ``eta``.
    """
    rr = reward_ranges(game)
    g0 = sizes.gamma0
    total = rr.delta_r + rr.delta_c
    bound = 1.0 / total if total > 0 else math.inf
    c1 = sizes.eta > 0 and (g0 is None or g0 > 0)
    product = 4.0 * (g0 or 0.0) ** 2 * rr.delta_r * rr.delta_c
    c2 = product < 1.0
    c3 = sizes.eta < bound and (g0 is None or g0 < bound)
    return ConditionReport(c1, c2, c3, rr.delta_r, rr.delta_c, product, bound)


@dataclass(frozen=True)
class LearnerConfig:
    algorithm: Algorithm
    sizes: StepSizes

    def __post_init__(self):
        object.__setattr__(self, "algorithm", Algorithm(self.algorithm))
        if self.algorithm.predicts and self.sizes.gamma0 is None:
            raise InvalidInputError(f"{self.algorithm.value} needs a prediction length gamma0")


@dataclass(frozen=True)
class LearnerState:
    """Mutable-by-replacement state of one learner.

    ``gamma_k`` is the current prediction length (starts at ``gamma0``);
    ``baseline`` is the slow GIGA-WoLF strategy (starts at ``strategy``).
    """

    algorithm: Algorithm
    strategy: np.ndarray
    sizes: StepSizes
    gamma_k: float | None = None
    baseline: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "algorithm", Algorithm(self.algorithm))
        s = np.array(np.atleast_1d(self.strategy), dtype=np.float64)
        object.__setattr__(self, "strategy", s)
        if self.gamma_k is None:
            object.__setattr__(self, "gamma_k", self.sizes.gamma0)
        z = s.copy() if self.baseline is None else np.array(np.atleast_1d(self.baseline), dtype=np.float64)
        object.__setattr__(self, "baseline", z)

    @classmethod
    def initial(cls, config, strategy):
        return cls(config.algorithm, strategy, config.sizes)


@dataclass(frozen=True)
class TrajectoryRecord:
    """One iteration: strategies at step ``k`` and what was computed from them.

    ``predictions`` holds the projected forecasts of every agent's strategy
    when some agent runs GA-SPP, else None. ``gamma_k`` is a per-agent tuple
    (the prediction length in force during this step).
    """

    k: int
    strategies: tuple
    predictions: tuple | None
    gradients: tuple
    gamma_k: tuple
    outcome: StepOutcome

    @property
    def terminated(self):
        return self.outcome is StepOutcome.TERMINATED


@dataclass
class Trajectory:
    """Column-oriented sequence of :class:`TrajectoryRecord` (one array per field)."""

    k: np.ndarray
    strategies: list
    predictions: list
    gradients: list
    gamma: np.ndarray
    outcomes: np.ndarray

    def __len__(self):
        return len(self.k)

    def __getitem__(self, i):
        preds = tuple(p[i] for p in self.predictions)
        if all(np.all(np.isnan(p)) for p in preds):
            preds = None
        return TrajectoryRecord(
            k=int(self.k[i]),
            strategies=tuple(s[i] for s in self.strategies),
            predictions=preds,
            gradients=tuple(g[i] for g in self.gradients),
            gamma_k=tuple(float(g) for g in self.gamma[i]),
            outcome=_OUTCOMES[int(self.outcomes[i])],
        )

    def __iter__(self):
        for i in range(len(self)):
            yield self[i]


@dataclass(frozen=True)
class RunSummary:
    converged: bool
    terminated: bool
    stop_reason: str
    iterations: int
    final: tuple
    gamma_final: tuple
    exploitability: float
    extra: dict = field(default_factory=dict)


def _check_feasible(x, what):
    if not contains(x):
        raise InvalidStateError(f"{what} strategy {x} is outside its simplex")


def _gammas(configs):
    """Per-agent prediction lengths; non-predicting agents borrow a predictor's."""
    given = [c.gamma0 for c in configs]
    fallback = next((g for g in given if g is not None), 0.0)
    return np.array([g if g is not None else fallback for g in given], dtype=np.float64)


def _step(game, row, col, algs, k=0):
    a = np.ascontiguousarray(row.strategy, dtype=np.float64)
    b = np.ascontiguousarray(col.strategy, dtype=np.float64)
    if a.shape != (game.m - 1,) or b.shape != (game.n - 1,):
        raise InvalidInputError("strategy length does not match the game")
    _check_feasible(a, "row")
    _check_feasible(b, "column")
    _check_feasible(row.baseline, "row baseline")
    _check_feasible(col.baseline, "column baseline")
    alg = np.array([x.code for x in algs], dtype=np.int64)
    eta = np.array([row.sizes.eta, col.sizes.eta])
    mu = np.array([row.sizes.mu, col.sizes.mu])
    gamma = _gammas([StepSizes(1.0, row.gamma_k), StepSizes(1.0, col.gamma_k)])
    a_new, za_new, pa, ga = (np.empty(game.m - 1) for _ in range(4))
    b_new, zb_new, pb, gb = (np.empty(game.n - 1) for _ in range(4))
    gamma_new = np.empty(2)
    code = _kernels.bimatrix_step(
        game.R, game._CT, alg, eta, mu, gamma, a, b,
        np.ascontiguousarray(row.baseline), np.ascontiguousarray(col.baseline),
        TERMINATION_TOL, a_new, b_new, za_new, zb_new, pa, pb, ga, gb, gamma_new,
    )
    outcome = _OUTCOMES[code]
    spp = Algorithm.GASPP in algs
    record = TrajectoryRecord(
        k=k,
        strategies=(a.copy(), b.copy()),
        predictions=(pa, pb) if spp else None,
        gradients=(ga, gb),
        gamma_k=(float(gamma[0]), float(gamma[1])),
        outcome=outcome,
    )

    def advance(state, x, z, g):
        gk = float(g) if state.gamma_k is not None else None
        return LearnerState(state.algorithm, x, state.sizes, gk, z)

    new_row = advance(row, a_new, za_new, gamma_new[0])
    new_col = advance(col, b_new, zb_new, gamma_new[1])
    return new_row, new_col, record, outcome


def step(game, row, col, k=0):
    """Advance both learners by one iteration, each with its own algorithm.

    Returns ``(new_row, new_col, record, outcome)``.
    """
    return _step(game, row, col, (row.algorithm, col.algorithm), k)


def gaspp_step(game, row, col, k=0):
    """One GA-SPP iteration for both agents.

    Step 1 forecasts each agent's next strategy with the prediction length,
    step 2 moves each agent against the opponent's forecast, step 3
    terminates, shrinks the prediction length, or continues.
    Returns ``(new_row, new_col, record, outcome)``.
    """
    if row.gamma_k is None or col.gamma_k is None:
        raise InvalidInputError("GA-SPP needs a prediction length for both agents")
    return _step(game, row, col, (Algorithm.GASPP, Algorithm.GASPP), k)


def ga_step(game, row, col, k=0):
    """One projected gradient ascent step for both agents: ``(new_row, new_col, record)``."""
    return _step(game, row, col, (Algorithm.GA, Algorithm.GA), k)[:3]


def igapp_step(game, row, col, k=0):
    """One IGA-PP step: respond to the unprojected forecast of the opponent."""
    if row.gamma_k is None or col.gamma_k is None:
        raise InvalidInputError("IGA-PP needs a prediction length for both agents")
    return _step(game, row, col, (Algorithm.IGAPP, Algorithm.IGAPP), k)[:3]


def gigawolf_step(game, row, col, k=0):
    """One GIGA-WoLF step for both agents: ``(new_row, new_col, record)``."""
    return _step(game, row, col, (Algorithm.GIGAWOLF, Algorithm.GIGAWOLF), k)[:3]


def _as_configs(learners, count):
    if isinstance(learners, LearnerConfig):
        return [learners] * count
    learners = list(learners)
    if len(learners) != count:
        raise InvalidInputError(f"expected {count} learner configs, got {len(learners)}")
    return learners


def _check_positive(configs):
    for c in configs:
        if c.sizes.eta <= 0 or (c.algorithm.predicts and c.sizes.gamma0 <= 0):
            raise InvalidInputError(f"step sizes must be positive, got {c.sizes}")


def run(game, learners, initial, max_iters, tol=DEFAULT_TOL, record_stride=1,
        window=DEFAULT_WINDOW):
    """Simulate two learners from ``initial = (alpha0, beta0)``.

    Stops when GA-SPP terminates, when the joint strategy moves by less than
    ``tol`` (max-norm) for ``window`` consecutive non-shrinking iterations,
    or after ``max_iters`` iterations. Every ``record_stride``-th iteration
    and the last one are recorded.

    Returns ``(trajectory, summary)``.
    """
    configs = _as_configs(learners, 2)
    _check_positive(configs)
    a0 = np.array(np.atleast_1d(initial[0]), dtype=np.float64)
    b0 = np.array(np.atleast_1d(initial[1]), dtype=np.float64)
    if a0.shape != (game.m - 1,) or b0.shape != (game.n - 1,):
        raise InvalidInputError("initial strategy length does not match the game")
    _check_feasible(a0, "row")
    _check_feasible(b0, "column")
    max_iters = int(max_iters)
    record_stride = max(int(record_stride), 1)

    n_max = max_iters // record_stride + 2
    m1, n1 = game.m - 1, game.n - 1
    rec_k = np.zeros(n_max, dtype=np.int64)
    rec_a, rec_pa, rec_ga = (np.zeros((n_max, m1)) for _ in range(3))
    rec_b, rec_pb, rec_gb = (np.zeros((n_max, n1)) for _ in range(3))
    rec_gamma = np.zeros((n_max, 2))
    rec_out = np.zeros(n_max, dtype=np.int64)
    a = np.empty(m1)
    b = np.empty(n1)
    gamma = np.empty(2)

    n_rec, iters, stop = _kernels.bimatrix_run(
        game.R, game._CT,
        np.array([c.algorithm.code for c in configs], dtype=np.int64),
        np.array([c.sizes.eta for c in configs]),
        np.array([c.sizes.mu for c in configs]),
        _gammas([c.sizes for c in configs]),
        a0, b0, max_iters, float(tol), int(window), record_stride, TERMINATION_TOL,
        rec_k, rec_a, rec_b, rec_pa, rec_pb, rec_ga, rec_gb, rec_gamma, rec_out,
        a, b, gamma,
    )
    if max_iters <= 0:
        a, b, gamma = a0.copy(), b0.copy(), _gammas([c.sizes for c in configs])
    traj = Trajectory(
        k=rec_k[:n_rec],
        strategies=[rec_a[:n_rec], rec_b[:n_rec]],
        predictions=[rec_pa[:n_rec], rec_pb[:n_rec]],
        gradients=[rec_ga[:n_rec], rec_gb[:n_rec]],
        gamma=rec_gamma[:n_rec],
        outcomes=rec_out[:n_rec],
    )
    summary = RunSummary(
        converged=stop != _kernels.STOP_MAX_ITERS,
        terminated=stop == _kernels.STOP_TERMINATED,
        stop_reason=_STOP_REASONS[stop],
        iterations=int(iters),
        final=(a, b),
        gamma_final=tuple(float(g) for g in gamma),
        exploitability=exploitability(game, a, b),
    )
    return traj, summary


# -- n-player extension ---------------------------------------------------------


@dataclass(frozen=True)
class TensorGame:
    """Normal-form game of ``p`` players.

    ``payoffs[i]`` is player ``i``'s payoff tensor indexed by the joint
    action ``(a_0, ..., a_{p-1})``, so ``payoffs`` has shape ``(p, k_0, ..., k_{p-1})``.
    """

    payoffs: np.ndarray
    name: str = field(default="", compare=False)

    def __post_init__(self):
        P = np.array(self.payoffs, dtype=np.float64)
        if P.ndim < 3 or P.shape[0] != P.ndim - 1:
            raise InvalidInputError(f"payoffs must have shape (p, k_0, ..., k_(p-1)), got {P.shape}")
        if min(P.shape[1:]) < 2:
            raise InvalidInputError("each player needs at least two actions")
        if not np.all(np.isfinite(P)):
            raise InvalidInputError("payoffs must be finite")
        P.setflags(write=False)
        object.__setattr__(self, "payoffs", P)

    @property
    def players(self):
        return self.payoffs.shape[0]

    @property
    def sizes(self):
        return self.payoffs.shape[1:]

    @classmethod
    def from_bimatrix(cls, game):
        return cls(np.stack([game.R, game.C]), name=game.name)

    def payoff_vector(self, i, strategies):
        """Expected payoff of each pure action of player ``i`` against the others."""
        T = self.payoffs[i]
        # contract from the last player backwards so axis indices stay valid
        for j in reversed(range(self.players)):
            if j == i:
                continue
            full = np.append(strategies[j], 1.0 - np.sum(strategies[j]))
            T = np.tensordot(T, full, axes=([j], [0]))
        return T

    def reward_ranges(self):
        return tuple(float(self.payoffs[i].max() - self.payoffs[i].min()) for i in range(self.players))


def nplayer_exploitability(game, strategies):
    gains = []
    for i in range(game.players):
        v = game.payoff_vector(i, strategies)
        full = np.append(strategies[i], 1.0 - np.sum(strategies[i]))
        gains.append(v.max() - full @ v)
    return float(max(max(gains), 0.0))


def nplayer_conditions(game, sizes):
    """Lift of the step-size conditions to ``p`` players.

    Condition 2 must hold for every pair of players and condition 3 uses the
    sum of all reward ranges.
    """
    deltas = game.reward_ranges()
    g0 = sizes.gamma0
    total = sum(deltas)
    bound = 1.0 / total if total > 0 else math.inf
    c1 = sizes.eta > 0 and (g0 is None or g0 > 0)
    product = max(4.0 * (g0 or 0.0) ** 2 * deltas[i] * deltas[j]
                  for i in range(len(deltas)) for j in range(i + 1, len(deltas)))
    c3 = sizes.eta < bound and (g0 is None or g0 < bound)
    return ConditionReport(c1, product < 1.0, c3, deltas[0], deltas[1], product, bound)


def run_nplayer(game, learners, initial, max_iters, tol=DEFAULT_TOL, record_stride=1,
                window=DEFAULT_WINDOW):
    """Simulate ``p`` learners on a :class:`TensorGame`.

    GA-SPP players forecast every player's strategy with the shared
    prediction length and respond to the forecast joint strategy; step 3 of
    GA-SPP is applied jointly. ``initial`` holds one reduced strategy per
    player. Returns ``(trajectory, summary)`` as :func:`run` does.
    """
    if isinstance(game, BimatrixGame):
        game = TensorGame.from_bimatrix(game)
    p = game.players
    configs = _as_configs(learners, p)
    _check_positive(configs)
    sizes = np.array(game.sizes, dtype=np.int64)
    kmax = int(sizes.max())
    X0 = np.zeros((p, kmax - 1))
    for i, x in enumerate(initial):
        x = np.atleast_1d(np.asarray(x, dtype=np.float64))
        if x.shape != (sizes[i] - 1,):
            raise InvalidInputError(f"initial strategy of player {i} has the wrong length")
        _check_feasible(x, f"player {i}")
        X0[i, : sizes[i] - 1] = x
    if len(initial) != p:
        raise InvalidInputError(f"expected {p} initial strategies")
    gammas = [c.sizes.gamma0 for c in configs if c.sizes.gamma0 is not None]
    gamma0 = float(gammas[0]) if gammas else 0.0
    mu = next((c.sizes.mu for c in configs if c.algorithm is Algorithm.GASPP), DEFAULT_MU)
    max_iters = int(max_iters)
    record_stride = max(int(record_stride), 1)

    n_max = max_iters // record_stride + 2
    rec_k = np.zeros(n_max, dtype=np.int64)
    rec_X = np.zeros((n_max, p, kmax - 1))
    rec_Xp = np.zeros_like(rec_X)
    rec_G = np.zeros_like(rec_X)
    rec_gamma = np.zeros(n_max)
    rec_out = np.zeros(n_max, dtype=np.int64)
    X = np.empty_like(X0)
    n_rec, iters, stop, gamma = _kernels.tensor_run(
        np.ascontiguousarray(game.payoffs.reshape(p, -1)), sizes,
        np.array([c.algorithm.code for c in configs], dtype=np.int64),
        np.array([c.sizes.eta for c in configs]), float(mu), gamma0, X0,
        max_iters, float(tol), int(window), record_stride, TERMINATION_TOL,
        rec_k, rec_X, rec_Xp, rec_G, rec_gamma, rec_out, X,
    )
    if max_iters <= 0:
        X, gamma = X0.copy(), gamma0
    dims = [int(s) - 1 for s in sizes]
    final = tuple(X[i, : dims[i]].copy() for i in range(p))
    traj = Trajectory(
        k=rec_k[:n_rec],
        strategies=[rec_X[:n_rec, i, : dims[i]] for i in range(p)],
        predictions=[rec_Xp[:n_rec, i, : dims[i]] for i in range(p)],
        gradients=[rec_G[:n_rec, i, : dims[i]] for i in range(p)],
        gamma=np.repeat(rec_gamma[:n_rec, None], p, axis=1),
        outcomes=rec_out[:n_rec],
    )
    summary = RunSummary(
        converged=stop != _kernels.STOP_MAX_ITERS,
        terminated=stop == _kernels.STOP_TERMINATED,
        stop_reason=_STOP_REASONS[stop],
        iterations=int(iters),
        final=final,
        gamma_final=(float(gamma),) * p,
        exploitability=nplayer_exploitability(game, final),
    )
    return traj, summary
