"""Experiment configuration documents.

A config is one JSON object. Only ``game`` is required::

    {
      "game": "shapleys_game",          # registry name or {"R": ..., "C": ...} or {"payoffs": ...}
      "learners": [                     # one object per agent, or a single object shared by all
        {"algorithm": "GASPP", "eta": 0.001, "gamma0": 3.0, "mu": 0.5}
      ],
      "initial": [[0.1, 0.8], [0.8, 0.1]],   # reduced strategies; default uniform
      "max_iters": 1000000,
      "tol_converge": 1e-10,
      "window": 100,
      "record_stride": 100,
      "allow_condition_override": true,
      "output": "runs/shapley"          # directory for trajectory.csv and summary.json
    }

Unknown keys are rejected. The step-size conditions are enforced unless
``allow_condition_override`` is set, in which case a violation is logged
as a warning; non-positive step sizes are always rejected.
"""
import json
import logging
import math
import numbers
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from gaspp.errors import ConfigError, InvalidInputError
from gaspp.game import BimatrixGame
from gaspp.geometry import contains
from gaspp.learners import (
    DEFAULT_MU,
    DEFAULT_TOL,
    DEFAULT_WINDOW,
    Algorithm,
    LearnerConfig,
    StepSizes,
    nplayer_conditions,
    validate_conditions,
)
from gaspp.registry import BENCHMARKS, game_from_document

log = logging.getLogger(__name__)

DEFAULT_LEARNER = {"algorithm": "GASPP", "eta": 0.001, "gamma0": 0.1}
DEFAULT_MAX_ITERS = 1_000_000
DEFAULT_STRIDE = 100

_TOP_KEYS = {
    "game", "learners", "initial", "max_iters", "tol_converge", "window",
    "record_stride", "allow_condition_override", "output",
}
_LEARNER_KEYS = {"algorithm", "eta", "gamma0", "mu"}


@dataclass(frozen=True)
class ExperimentConfig:
    game: object
    learners: tuple
    initial: tuple
    max_iters: int = DEFAULT_MAX_ITERS
    tol_converge: float = DEFAULT_TOL
    window: int = DEFAULT_WINDOW
    record_stride: int = DEFAULT_STRIDE
    allow_condition_override: bool = False
    output: Path | None = None

    @property
    def players(self):
        return len(self.learners)

    @property
    def is_bimatrix(self):
        return isinstance(self.game, BimatrixGame)


def condition_reports(game, learners):
    """One condition report per learner."""
    check = validate_conditions if isinstance(game, BimatrixGame) else nplayer_conditions
    return [check(game, c.sizes) for c in learners]


def _number(value, field, integer=False):
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise ConfigError(f"{field} must be a number", field=field)
    if integer and value != int(value):
        raise ConfigError(f"{field} must be an integer", field=field)
    if not math.isfinite(value):
        raise ConfigError(f"{field} must be finite", field=field)
    return int(value) if integer else float(value)


def _learner(doc, field):
    if not isinstance(doc, dict):
        raise ConfigError(f"{field} must be an object", field=field)
    unknown = set(doc) - _LEARNER_KEYS
    if unknown:
        key = sorted(unknown)[0]
        raise ConfigError(f"unknown key {key!r}", field=f"{field}.{key}")
    try:
        algorithm = Algorithm(doc.get("algorithm", "GASPP"))
    except ValueError:
        raise ConfigError(
            f"algorithm must be one of {[a.value for a in Algorithm]}", field=f"{field}.algorithm"
        ) from None
    if "eta" not in doc:
        raise ConfigError("eta is required", field=f"{field}.eta")
    eta = _number(doc["eta"], f"{field}.eta")
    gamma0 = doc.get("gamma0")
    if gamma0 is not None:
        gamma0 = _number(gamma0, f"{field}.gamma0")
    elif algorithm.predicts:
        raise ConfigError(f"{algorithm.value} needs gamma0", field=f"{field}.gamma0")
    mu = _number(doc.get("mu", DEFAULT_MU), f"{field}.mu")
    if not 0.0 < mu < 1.0:
        raise ConfigError("mu must lie in (0, 1)", field=f"{field}.mu")
    if eta <= 0:
        raise ConfigError("condition1 violated: eta must be positive", field=f"{field}.eta")
    if gamma0 is not None and gamma0 <= 0:
        raise ConfigError("condition1 violated: gamma0 must be positive", field=f"{field}.gamma0")
    return LearnerConfig(algorithm, StepSizes(eta, gamma0, mu))


def _game(doc):
    if isinstance(doc, str):
        if doc not in BENCHMARKS:
            raise ConfigError(f"unknown game {doc!r}; known: {', '.join(BENCHMARKS)}", field="game")
        return BENCHMARKS[doc].game
    try:
        return game_from_document(doc, name="inline")
    except (InvalidInputError, ValueError, TypeError) as exc:
        raise ConfigError(str(exc), field="game") from None


def _dims(game):
    if isinstance(game, BimatrixGame):
        return [game.m - 1, game.n - 1]
    return [k - 1 for k in game.sizes]


def config_from_dict(doc, base_dir=None):
    """Validate a parsed config document; see the module docstring for the schema."""
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(doc) - _TOP_KEYS
    if unknown:
        key = sorted(unknown)[0]
        raise ConfigError(f"unknown key {key!r}", field=key)
    if "game" not in doc:
        raise ConfigError("game is required", field="game")
    game = _game(doc["game"])
    dims = _dims(game)
    players = len(dims)

    learners_doc = doc.get("learners", DEFAULT_LEARNER)
    if isinstance(learners_doc, dict):
        learners = (_learner(learners_doc, "learners"),) * players
    elif isinstance(learners_doc, list):
        if len(learners_doc) != players:
            raise ConfigError(f"expected {players} learners, got {len(learners_doc)}", field="learners")
        learners = tuple(_learner(d, f"learners[{i}]") for i, d in enumerate(learners_doc))
    else:
        raise ConfigError("learners must be an object or a list", field="learners")

    if "initial" in doc:
        init_doc = doc["initial"]
        if not isinstance(init_doc, list) or len(init_doc) != players:
            raise ConfigError(f"initial must list {players} strategies", field="initial")
        initial = []
        for i, (x, d) in enumerate(zip(init_doc, dims)):
            field = f"initial[{i}]"
            if isinstance(x, numbers.Real) and not isinstance(x, bool):
                x = [x]
            if not isinstance(x, list) or len(x) != d:
                raise ConfigError(f"{field} must hold {d} probabilities", field=field)
            arr = np.array([_number(v, field) for v in x])
            if not contains(arr):
                raise ConfigError(f"{field} is not a reduced mixed strategy", field=field)
            initial.append(arr)
    else:
        initial = [np.full(d, 1.0 / (d + 1)) for d in dims]

    max_iters = _number(doc.get("max_iters", DEFAULT_MAX_ITERS), "max_iters", integer=True)
    if max_iters <= 0:
        raise ConfigError("max_iters must be positive", field="max_iters")
    tol = _number(doc.get("tol_converge", DEFAULT_TOL), "tol_converge")
    if tol <= 0:
        raise ConfigError("tol_converge must be positive", field="tol_converge")
    window = _number(doc.get("window", DEFAULT_WINDOW), "window", integer=True)
    if window <= 0:
        raise ConfigError("window must be positive", field="window")
    stride = _number(doc.get("record_stride", DEFAULT_STRIDE), "record_stride", integer=True)
    if stride <= 0:
        raise ConfigError("record_stride must be positive", field="record_stride")
    override = doc.get("allow_condition_override", False)
    if not isinstance(override, bool):
        raise ConfigError("allow_condition_override must be true or false", field="allow_condition_override")
    output = doc.get("output")
    if output is not None:
        if not isinstance(output, str) or not output:
            raise ConfigError("output must be a non-empty path", field="output")
        output = Path(output)
        if base_dir is not None and not output.is_absolute():
            output = Path(base_dir) / output

    for i, report in enumerate(condition_reports(game, learners)):
        if report.passed:
            continue
        field = f"learners[{i}]"
        msg = f"{', '.join(report.failures)} violated for {field} (step bound {report.step_bound:g})"
        if not override:
            raise ConfigError(msg, field=field)
        log.warning("%s; continuing because allow_condition_override is set", msg)

    return ExperimentConfig(
        game=game,
        learners=learners,
        initial=tuple(initial),
        max_iters=max_iters,
        tol_converge=tol,
        window=window,
        record_stride=stride,
        allow_condition_override=override,
        output=output,
    )


def load_config(path):
    """Read and validate a JSON config; relative ``output`` paths resolve against the file's directory."""
    path = Path(path)
    text = path.read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: {exc.msg}", line=exc.lineno, column=exc.colno) from None
    return config_from_dict(doc, base_dir=path.parent)
