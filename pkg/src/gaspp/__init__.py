"""Gradient-based multi-agent learning in normal-form games.

The central algorithm is gradient ascent with shrinking policy prediction
(GA-SPP); plain gradient ascent, IGA-PP and GIGA-WoLF are provided for
comparison, together with game classification, a Nash-equilibrium oracle
and closed-form analysis of 2x2 dynamics.
"""
from gaspp.analysis2x2 import Case, Dynamics2x2, Outcome, analyze, eigencoords, predict_outcome
from gaspp.config import ExperimentConfig, load_config
from gaspp.equilibrium import enumerate_ne, exploitability, projected_gradient_test
from gaspp.errors import (
    ConfigError,
    InvalidInputError,
    InvalidStateError,
    UnsupportedCaseError,
    UnsupportedShapeError,
)
from gaspp.experiments import read_trajectory_csv, reproduce_paper, run_experiment
from gaspp.game import BimatrixGame, GameClass, classify, full_strategy, gradients, payoffs, reward_ranges
from gaspp.geometry import SimplexSet, contains, project, projected_gradient
from gaspp.learners import (
    Algorithm,
    LearnerConfig,
    LearnerState,
    StepOutcome,
    StepSizes,
    TensorGame,
    ga_step,
    gaspp_step,
    gigawolf_step,
    igapp_step,
    run,
    run_nplayer,
    step,
    validate_conditions,
)
from gaspp.registry import BENCHMARKS, get_game

__all__ = [
    "Algorithm", "BENCHMARKS", "BimatrixGame", "Case", "ConfigError", "Dynamics2x2",
    "ExperimentConfig", "GameClass", "InvalidInputError", "InvalidStateError", "LearnerConfig",
    "LearnerState", "Outcome", "SimplexSet", "StepOutcome", "StepSizes", "TensorGame",
    "UnsupportedCaseError", "UnsupportedShapeError", "analyze", "classify", "contains",
    "eigencoords", "enumerate_ne", "exploitability", "full_strategy", "ga_step", "gaspp_step",
    "get_game", "gigawolf_step", "gradients", "igapp_step", "load_config", "payoffs",
    "predict_outcome", "project", "projected_gradient", "projected_gradient_test",
    "read_trajectory_csv", "reproduce_paper", "reward_ranges", "run", "run_experiment",
    "run_nplayer", "step", "validate_conditions",
]
