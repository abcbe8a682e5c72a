import numpy as np
import pytest

from gaspp.errors import InvalidInputError, UnsupportedShapeError
from gaspp.game import (
    BimatrixGame,
    Reduced2x2Params,
    classify,
    coupling_matrix,
    gradients,
    payoffs,
    psd_gap,
    reduced_params,
    reward_ranges,
)
from gaspp.registry import PRISONERS_DILEMMA, ROCK_PAPER_SCISSORS, TWO_BY_THREE

MATCHING_PENNIES = BimatrixGame.zero_sum([[1, -1], [-1, 1]])


def random_profile(rng, m, n):
    return rng.dirichlet(np.ones(m))[:-1], rng.dirichlet(np.ones(n))[:-1]


def test_game_rejects_bad_input():
    with pytest.raises(InvalidInputError):
        BimatrixGame([[1, 2]], [[1, 2]])
    with pytest.raises(InvalidInputError):
        BimatrixGame(np.eye(2), np.eye(3))
    with pytest.raises(InvalidInputError):
        BimatrixGame([[1, np.nan], [0, 0]], np.eye(2))


def test_game_arrays_are_read_only():
    g = BimatrixGame(np.eye(2), np.eye(2))
    with pytest.raises(ValueError):
        g.R[0, 0] = 5.0


@pytest.mark.parametrize("game, a, b, expected", [
    (PRISONERS_DILEMMA, [1.0], [1.0], (-1.0, -1.0)),
    (PRISONERS_DILEMMA, [0.0], [0.0], (-2.0, -2.0)),
    (ROCK_PAPER_SCISSORS, [1 / 3, 1 / 3], [1 / 3, 1 / 3], (0.0, 0.0)),
])
def test_payoff_examples(game, a, b, expected):
    np.testing.assert_allclose(payoffs(game, a, b), expected, atol=1e-15)


def test_payoffs_check_lengths():
    with pytest.raises(InvalidInputError):
        payoffs(PRISONERS_DILEMMA, [0.5, 0.5], [0.5])


def test_gradient_examples():
    ga, gb = gradients(ROCK_PAPER_SCISSORS, [1 / 3, 1 / 3], [1 / 3, 1 / 3])
    np.testing.assert_allclose(ga, 0.0, atol=1e-15)
    np.testing.assert_allclose(gb, 0.0, atol=1e-15)
    rng = np.random.default_rng(0)
    for _ in range(20):
        ga, gb = gradients(PRISONERS_DILEMMA, [rng.uniform()], [rng.uniform()])
        np.testing.assert_allclose((ga[0], gb[0]), (-1.0, -1.0), atol=1e-15)
    const = BimatrixGame(np.full((2, 2), 3.0), np.full((2, 2), -2.0))
    assert gradients(const, [0.3], [0.6]) == ([0.0], [0.0])


def test_gradients_match_central_differences():
    rng = np.random.default_rng(1)
    h = 1e-5
    for _ in range(200):
        m, n = rng.integers(2, 6, size=2)
        g = BimatrixGame(rng.uniform(-1, 1, (m, n)), rng.uniform(-1, 1, (m, n)))
        a, b = random_profile(rng, m, n)
        ga, gb = gradients(g, a, b)
        for i in range(m - 1):
            e = np.eye(m - 1)[i] * h
            fd = (payoffs(g, a + e, b)[0] - payoffs(g, a - e, b)[0]) / (2 * h)
            assert abs(fd - ga[i]) <= 1e-8
        for j in range(n - 1):
            e = np.eye(n - 1)[j] * h
            fd = (payoffs(g, a, b + e)[1] - payoffs(g, a, b - e)[1]) / (2 * h)
            assert abs(fd - gb[j]) <= 1e-8


def test_reward_ranges():
    rr = reward_ranges(PRISONERS_DILEMMA)
    assert (rr.delta_r, rr.delta_c) == (3.0, 3.0)
    rr = reward_ranges(ROCK_PAPER_SCISSORS)
    assert (rr.delta_r, rr.delta_c) == (2.0, 2.0)
    rr = reward_ranges(BimatrixGame(np.ones((3, 2)), np.ones((3, 2))))
    assert (rr.delta_r, rr.delta_c) == (0.0, 0.0)


def test_reduced_params_examples():
    assert reduced_params(PRISONERS_DILEMMA) == Reduced2x2Params(0.0, -1.0, 0.0, -1.0)
    p = reduced_params(TWO_BY_THREE)
    np.testing.assert_array_equal(p.u_r, [-1, -3])
    assert p.b_r == 2.0
    np.testing.assert_array_equal(p.u_c, [3, 6])
    np.testing.assert_array_equal(p.b_c, [2, 1])
    p = reduced_params(MATCHING_PENNIES)
    assert (p.u_r, p.u_c) == (4.0, -4.0)
    with pytest.raises(UnsupportedShapeError):
        reduced_params(ROCK_PAPER_SCISSORS)


def test_two_by_n_identity():
    rng = np.random.default_rng(2)
    for _ in range(200):
        n = rng.integers(2, 6)
        g = BimatrixGame(rng.uniform(-1, 1, (2, n)), rng.uniform(-1, 1, (2, n)))
        p = reduced_params(g)
        a, b = random_profile(rng, 2, n)
        ga, gb = gradients(g, a, b)
        if n == 2:
            np.testing.assert_allclose(ga, p.u_r * b + p.b_r, atol=1e-12)
            np.testing.assert_allclose(gb, p.u_c * a + p.b_c, atol=1e-12)
        else:
            np.testing.assert_allclose(ga, b @ p.u_r + p.b_r, atol=1e-12)
            np.testing.assert_allclose(gb, a[0] * p.u_c + p.b_c, atol=1e-12)


def test_translation_invariance():
    rng = np.random.default_rng(3)
    for _ in range(100):
        m, n = rng.integers(2, 5, size=2)
        R, C = rng.uniform(-1, 1, (m, n)), rng.uniform(-1, 1, (m, n))
        shift = rng.uniform(-10, 10)
        g1, g2 = BimatrixGame(R, C), BimatrixGame(R + shift, C)
        a, b = random_profile(rng, m, n)
        for x, y in zip(gradients(g1, a, b), gradients(g2, a, b)):
            np.testing.assert_allclose(x, y, atol=1e-12)
        assert reward_ranges(g1).delta_r == pytest.approx(reward_ranges(g2).delta_r, abs=1e-12)
        if m == 2:
            np.testing.assert_allclose(reduced_params(g1).u_r, reduced_params(g2).u_r, atol=1e-12)


def test_u_bounded_by_twice_the_range():
    rng = np.random.default_rng(4)
    for _ in range(1000):
        g = BimatrixGame(rng.uniform(-1, 1, (2, 2)), rng.uniform(-1, 1, (2, 2)))
        p, rr = reduced_params(g), reward_ranges(g)
        assert abs(p.u_r) <= 2 * rr.delta_r + 1e-12
        assert abs(p.u_c) <= 2 * rr.delta_c + 1e-12


def test_classify_examples():
    assert classify(ROCK_PAPER_SCISSORS).tags == {"PSD"}
    mp = classify(MATCHING_PENNIES)
    assert mp.tags == {"PSD", "TwoByNAntiparallel", "TwoByTwo"}
    assert mp.antiparallel_delta == 1.0
    assert classify(TWO_BY_THREE).tags == {"General"}
    assert classify(TWO_BY_THREE).general
    assert str(mp) == "PSD, TwoByNAntiparallel(delta=1), TwoByTwo"


def test_antiparallel_delta_is_recovered():
    rng = np.random.default_rng(5)
    for _ in range(100):
        n = rng.integers(2, 5)
        delta = rng.uniform(0.1, 5)
        R = rng.uniform(-1, 1, (2, n))
        # C chosen so that u_c = -u_r / delta
        C = -R / delta + rng.uniform(-1, 1, (1, n))
        cls = classify(BimatrixGame(R, C))
        assert cls.antiparallel_delta == pytest.approx(delta, rel=1e-9)


def test_zero_sum_is_psd():
    rng = np.random.default_rng(6)
    for _ in range(200):
        m, n = rng.integers(2, 6, size=2)
        assert "PSD" in classify(BimatrixGame.zero_sum(rng.normal(size=(m, n)))).tags


def test_psd_matrix_test_agrees_with_sampled_inequality():
    rng = np.random.default_rng(7)
    for trial in range(60):
        m, n = rng.integers(2, 4, size=2)
        R = rng.uniform(-1, 1, (m, n))
        # half the games are PSD by construction: R + C has no reduced coupling
        if trial % 2:
            C = -R + rng.normal(size=(m, 1)) + rng.normal(size=(1, n))
        else:
            C = rng.uniform(-1, 1, (m, n))
        g = BimatrixGame(R, C)
        gaps = [psd_gap(g, *random_profile(rng, m, n), *random_profile(rng, m, n)) for _ in range(1000)]
        sampled_psd = min(gaps) >= -1e-12
        assert classify(g).psd == sampled_psd
        assert classify(g).psd == bool(np.allclose(coupling_matrix(R + C), 0.0, atol=1e-9))
