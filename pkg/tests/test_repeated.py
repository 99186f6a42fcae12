import numpy as np
import pytest
from conftest import FIXTURES, random_game, random_profile
from oracles import deviation_values, gamma_direct, stage_terms_direct

from quitgame import (
    EventuallyCyclicProfile,
    QuittingGame,
    best_response,
    equilibrium_certificate_repeated,
    load_game,
    repeated_payoff,
    subgame_certificate,
    truncated_payoff,
)
from quitgame.repeated import deviation_terms


def stationary(*p):
    return EventuallyCyclicProfile.stationary(np.array(p, dtype=float))


def _series_oracle(game, pi, stages):
    """Plain partial sum of the payoff series, stage by stage."""
    total = np.zeros(game.num_players)
    reach = 1.0
    zero = np.zeros(game.num_players)
    for p in pi.stages(stages):
        absorb = gamma_direct(game, zero, p)
        total += reach * absorb
        reach *= np.prod(1 - p)
    return total


def _random_pi(rng, N):
    prefix = np.array([random_profile(rng, N) for _ in range(int(rng.integers(0, 3)))]).reshape(-1, N)
    cycle = np.array([random_profile(rng, N) for _ in range(int(rng.integers(1, 4)))])
    return EventuallyCyclicProfile(prefix, cycle)


def test_never_quitting_pays_zero(clash):
    res = repeated_payoff(clash, stationary(0, 0))
    np.testing.assert_array_equal(res.payoff, [0, 0])
    assert res.termination_prob == 0.0


def test_worked_payoffs(clash):
    res = repeated_payoff(clash, stationary(1, 0))
    np.testing.assert_allclose(res.payoff, [1, -1], atol=1e-12)
    assert res.termination_prob == 1.0
    res = repeated_payoff(clash, stationary(0.5, 0))
    np.testing.assert_allclose(res.payoff, _series_oracle(clash, stationary(0.5, 0), 200), atol=1e-10)
    np.testing.assert_allclose(res.payoff, [1, -1], atol=1e-12)
    pi = EventuallyCyclicProfile(np.zeros((0, 2)), [[1, 0], [0, 1]])
    np.testing.assert_allclose(repeated_payoff(clash, pi).payoff, [1, -1], atol=1e-12)


def test_truncation_examples(clash):
    t = truncated_payoff(clash, stationary(1, 0), 1)
    np.testing.assert_allclose(t.payoff, [1, -1])
    assert t.tail_bound == 0.0
    t = truncated_payoff(clash, stationary(0.5, 0), 50)
    assert np.max(np.abs(t.payoff - [1, -1])) <= 2.0**-50 * clash.r_max
    t = truncated_payoff(clash, stationary(0, 0), 10)
    np.testing.assert_array_equal(t.payoff, [0, 0])
    assert t.tail_bound == clash.r_max


def test_prefix_into_silent_cycle(clash):
    pi = EventuallyCyclicProfile([[0.5, 0]], [[0, 0]])
    res = repeated_payoff(clash, pi)
    np.testing.assert_allclose(res.payoff, [0.5, -0.5])
    assert res.termination_prob == pytest.approx(0.5)


def test_closed_form_against_truncation(rng):
    for _ in range(300):
        N = int(rng.integers(1, 5))
        game = random_game(rng, N, -2, 2)
        pi = _random_pi(rng, N)
        closed = repeated_payoff(game, pi).payoff
        assert np.max(np.abs(closed)) <= game.r_max + 1e-12
        for K in (1, 10, 100):
            t = truncated_payoff(game, pi, K)
            assert np.all(np.abs(closed - t.payoff) <= t.tail_bound + 1e-12)
            np.testing.assert_allclose(t.payoff, _series_oracle(game, pi, K), atol=1e-12)


def _solo_game(r):
    return QuittingGame(2, np.array([[0, 0], [r, 0], [0, 0], [0, 0]], dtype=float))


def test_best_response_against_passive_opponents():
    assert best_response(_solo_game(1.0), stationary(0, 0), 0).best_value == 1.0
    assert best_response(_solo_game(-1.0), stationary(0, 0), 0).best_value == 0.0


def test_best_response_worked(clash):
    dev = best_response(clash, stationary(1, 0), 1)
    assert dev.best_value == pytest.approx(-1.0, abs=1e-12)
    assert dev.best_policy == (0,)
    cert = equilibrium_certificate_repeated(clash, stationary(1, 0))
    assert cert.epsilon_star == 0.0


def test_passive_profile_gap_is_at_least_solo_payoff():
    cert = equilibrium_certificate_repeated(_solo_game(0.7), stationary(0, 0))
    assert cert.epsilon_star >= 0.7


def test_stage_terms_match_oracle(rng):
    for _ in range(100):
        N = int(rng.integers(1, 5))
        game = random_game(rng, N)
        stages = np.array([random_profile(rng, N) for _ in range(3)])
        n = int(rng.integers(N))
        got = np.column_stack(deviation_terms(game, stages, n))
        want = np.array([stage_terms_direct(game, s, n) for s in stages])
        np.testing.assert_allclose(got, want, atol=1e-12)


def test_bellman_residual_and_dominance(rng):
    for _ in range(300):
        N = int(rng.integers(1, 5))
        game = random_game(rng, N)
        pi = _random_pi(rng, N)
        cert = equilibrium_certificate_repeated(game, pi)
        assert np.all(cert.gaps >= -1e-9)
        for dev in cert.deviations:
            assert dev.bellman_residual <= 1e-10


def test_bellman_beats_random_deviations(rng):
    for _ in range(100):
        N = int(rng.integers(1, 5))
        game = random_game(rng, N)
        pi = _random_pi(rng, N)
        n = int(rng.integers(N))
        best = best_response(game, pi, n).best_value
        L = pi.period * int(rng.integers(1, 3))
        x_pre = rng.uniform(size=(2000, pi.prefix.shape[0]))
        x_cyc = rng.uniform(size=(2000, L))
        x_cyc[:500] = np.round(x_cyc[:500])
        values = deviation_values(game, pi, n, x_pre, x_cyc)
        assert best >= values.max() - 1e-8


def test_deviation_oracle_agrees_with_full_evaluation(rng):
    for _ in range(50):
        N = int(rng.integers(1, 4))
        game = random_game(rng, N)
        pi = _random_pi(rng, N)
        n = int(rng.integers(N))
        x_pre = rng.uniform(size=(1, pi.prefix.shape[0]))
        x_cyc = rng.uniform(size=(1, pi.period))
        value = deviation_values(game, pi, n, x_pre, x_cyc)[0]
        full = repeated_payoff(game, pi.with_player(n, x_pre[0], x_cyc[0])).payoff[n]
        assert value == pytest.approx(full, abs=1e-12)


def test_subgame_worked(clash):
    pi = EventuallyCyclicProfile([[1, 0]], [[0, 0]])
    sub = subgame_certificate(clash, pi)
    assert sub.per_shift == pytest.approx((0.0, 1.0))
    assert sub.epsilon_star == 1.0 and sub.worst_shift == 2


def test_subgame_of_stationary_is_plain_certificate(rng):
    game = random_game(rng, 3)
    pi = stationary(*random_profile(rng, 3))
    assert subgame_certificate(game, pi).epsilon_star == equilibrium_certificate_repeated(game, pi).epsilon_star
    cyc = EventuallyCyclicProfile(np.zeros((0, 3)), rng.uniform(size=(2, 3)))
    assert len(subgame_certificate(game, cyc).per_shift) == 2


def test_dominant_quit_fixture_is_an_equilibrium():
    game = load_game(FIXTURES / "dominant_quit.json")
    assert equilibrium_certificate_repeated(game, stationary(1, 1, 1)).epsilon_star == 0.0
