"""Benchmark games.

Payoffs are entered as (row, column) pairs exactly as they appear in the
usual tables, then split into the two matrices.
"""
import itertools
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from gaspp.errors import InvalidInputError
from gaspp.game import BimatrixGame
from gaspp.learners import TensorGame


def _from_pairs(pairs, name):
    arr = np.array(pairs, dtype=float)
    return BimatrixGame(arr[..., 0], arr[..., 1], name=name)


PRISONERS_DILEMMA = _from_pairs(
    [[(-1, -1), (-3, 0)],
     [(0, -3), (-2, -2)]],
    "prisoners_dilemma",
)
CHICKEN = _from_pairs(
    [[(-2, -2), (1, -1)],
     [(-1, 1), (-1, -1)]],
    "chicken",
)
BATTLE_OF_SEXES = _from_pairs(
    [[(3, 2), (1, 1)],
     [(0, 0), (2, 3)]],
    "battle_of_sexes",
)
ROCK_PAPER_SCISSORS = _from_pairs(
    [[(0, 0), (-1, 1), (1, -1)],
     [(1, -1), (0, 0), (-1, 1)],
     [(-1, 1), (1, -1), (0, 0)]],
    "rock_paper_scissors",
)
SHAPLEYS_GAME = _from_pairs(
    [[(0, 0), (1, 0), (0, 1)],
     [(0, 1), (0, 0), (1, 0)],
     [(1, 0), (0, 1), (0, 0)]],
    "shapleys_game",
)
TWO_BY_THREE = _from_pairs(
    [[(3, 3), (0, 5), (1, -2)],
     [(2, 2), (1, 1), (-1, 0)]],
    "two_by_three",
)


def jordan_matching_pennies():
    """Three-player matching pennies (Jordan's game).

    Player ``i`` plays against player ``i + 1 (mod 3)``: players 0 and 1
    score 1 for matching their successor, player 2 scores 1 for
    mismatching player 0, everything else scores 0. The unique equilibrium
    is uniform play.
    """
    P = np.zeros((3, 2, 2, 2))
    for a in itertools.product(range(2), repeat=3):
        for i in range(3):
            match = a[i] == a[(i + 1) % 3]
            wants_match = i < 2
            P[(i,) + a] = 1.0 if match == wants_match else 0.0
    return TensorGame(P, name="three_player_matching_pennies")


THREE_PLAYER_MATCHING_PENNIES = jordan_matching_pennies()


@dataclass(frozen=True)
class BenchmarkEntry:
    name: str
    game: object
    expected_class: frozenset
    expected_outcome: str


BENCHMARKS = {
    e.name: e
    for e in [
        BenchmarkEntry("prisoners_dilemma", PRISONERS_DILEMMA,
                       frozenset({"PSD", "TwoByNAntiparallel", "TwoByTwo"}), "converges_to_ne"),
        BenchmarkEntry("chicken", CHICKEN, frozenset({"TwoByTwo"}), "converges_to_ne"),
        BenchmarkEntry("battle_of_sexes", BATTLE_OF_SEXES, frozenset({"TwoByTwo"}), "converges_to_ne"),
        BenchmarkEntry("rock_paper_scissors", ROCK_PAPER_SCISSORS, frozenset({"PSD"}), "converges_to_ne"),
        BenchmarkEntry("shapleys_game", SHAPLEYS_GAME, frozenset({"General"}),
                       "gaspp_and_igapp_converge_gigawolf_oscillates"),
        BenchmarkEntry("two_by_three", TWO_BY_THREE, frozenset({"General"}),
                       "gaspp_converges_to_ne_igapp_to_non_ne"),
        BenchmarkEntry("three_player_matching_pennies", THREE_PLAYER_MATCHING_PENNIES,
                       frozenset({"General"}), "no_convergence"),
    ]
}


def game_from_document(doc, name=""):
    """Build a game from ``{"R": ..., "C": ...}`` or ``{"payoffs": ...}`` (n-player)."""
    if not isinstance(doc, dict):
        raise InvalidInputError("game document must be an object")
    name = doc.get("name", name)
    if "payoffs" in doc:
        extra = set(doc) - {"payoffs", "name"}
        if extra:
            raise InvalidInputError(f"unknown game keys: {sorted(extra)}")
        return TensorGame(np.array(doc["payoffs"], dtype=float), name=name)
    extra = set(doc) - {"R", "C", "name"}
    if extra or "R" not in doc or "C" not in doc:
        raise InvalidInputError("game document needs exactly the keys 'R' and 'C' (and optional 'name')")
    return BimatrixGame(np.array(doc["R"], dtype=float), np.array(doc["C"], dtype=float), name=name)


def get_game(spec):
    """Resolve a registry name or a path to a JSON game document."""
    if spec in BENCHMARKS:
        return BENCHMARKS[spec].game
    path = Path(spec)
    if path.is_file():
        with open(path) as fh:
            return game_from_document(json.load(fh), name=path.stem)
    raise InvalidInputError(f"unknown game {spec!r}; known: {', '.join(BENCHMARKS)}")
