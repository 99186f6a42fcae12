import numpy as np
import pytest
from conftest import one_step, random_game
from oracles import equilibrium_grid, gamma_direct

from quitgame import (
    AssumptionViolated,
    BadEpsilon,
    NoQualifyingPlayer,
    QuittingGame,
    TooManyPlayers,
    construct_psi_member,
    equilibrium_certificate,
    find_one_step_equilibrium,
    select_player_m,
    verify_psi_certificate,
)
from quitgame.solver import in_V, satisfies_assumption_two


def _contains(profiles, target):
    return any(np.max(np.abs(p - target)) <= 1e-9 for p in profiles)


def test_finder_worked_cases(clash, tight_shift):
    assert _contains(find_one_step_equilibrium(one_step(clash, [0, 2])), [1, 0])
    found = find_one_step_equilibrium(one_step(clash, [0, 0]))
    assert _contains(found, [1, 0]) and _contains(found, [0, 1])
    assert _contains(find_one_step_equilibrium(one_step(tight_shift, [1, 2])), [0, 0])


def test_tight_shift_game_has_a_continuum_of_equilibria(tight_shift):
    # player 2 keeps continuing and player 1 is indifferent as long as
    # player 2's payoff from continuing stays at least its quit payoff
    g = one_step(tight_shift, [1, 2])
    for a in np.linspace(0, 2 / 3, 7):
        assert equilibrium_certificate(g, [a, 0]).epsilon_star <= 1e-12
    assert equilibrium_certificate(g, [0.7, 0]).epsilon_star > 0


def test_finder_output_is_certified_by_grid_oracle(rng):
    for _ in range(150):
        N = int(rng.integers(1, 4))
        g = one_step(random_game(rng, N), rng.uniform(-1, 1, N))
        found = find_one_step_equilibrium(g)
        assert found, "every finite one-step game has an equilibrium"
        for p in found:
            assert equilibrium_grid(g.game, g.v, p, points=11) <= 1e-9


def test_finder_handles_four_and_five_players(rng):
    for N in (4, 5):
        for _ in range(5):
            g = one_step(random_game(rng, N), rng.uniform(-1, 1, N))
            found = find_one_step_equilibrium(g)
            assert found
            for p in found:
                assert equilibrium_certificate(g, p).epsilon_star <= 1e-9


def test_finder_player_cap(rng):
    with pytest.raises(TooManyPlayers):
        find_one_step_equilibrium(one_step(random_game(rng, 6), np.zeros(6)))


def test_select_player_worked(clash, tight_shift):
    assert select_player_m(one_step(tight_shift, [1, 2]), [0, 0]) == 0
    assert select_player_m(one_step(clash, [0, 2]), [1, 0]) == 0
    with pytest.raises(NoQualifyingPlayer):
        select_player_m(one_step(tight_shift, [0.5, 2]), [0, 0])


def test_psi_worked_clash(clash):
    g = one_step(clash, [0, 2])
    cert = construct_psi_member(g, 0.1)
    assert cert.m == 0
    np.testing.assert_allclose(cert.p_source, [1, 0])
    np.testing.assert_allclose(cert.p_hat, [1, 0])
    assert cert.continue_prob == 0.0 and cert.valid
    assert verify_psi_certificate(g, cert).valid


def test_psi_worked_tight_shift(tight_shift):
    g = one_step(tight_shift, [1, 2])
    cert = construct_psi_member(g, 0.1)
    assert cert.m == 0
    np.testing.assert_allclose(cert.p_source, [0, 0])
    np.testing.assert_allclose(cert.p_hat, [0.1, 0], atol=1e-15)
    np.testing.assert_allclose(cert.gamma_hat, [1, 1.7], atol=1e-12)
    assert cert.continue_prob == pytest.approx(0.9, abs=1e-12)
    assert cert.perfect_epsilon <= 0.2 + 1e-9
    assert cert.valid and verify_psi_certificate(g, cert).valid


@pytest.mark.parametrize("eps", [0.0, 1.0, -0.1, 1.5])
def test_psi_rejects_bad_epsilon(clash, eps):
    with pytest.raises(BadEpsilon):
        construct_psi_member(one_step(clash, [0, 2]), eps)


def test_psi_rejects_broken_assumptions(clash):
    # player 1 gets 1/2 when quitting alone
    halved = QuittingGame(2, np.where(np.arange(4)[:, None] == 1, [0.5, -1], clash.table))
    with pytest.raises(AssumptionViolated):
        construct_psi_member(one_step(halved, [0, 2]), 0.1)
    # every entry of v above 1
    with pytest.raises(AssumptionViolated):
        construct_psi_member(one_step(clash, [1.5, 2]), 0.1)
    # outside the box of half-width 2 r_max = 4
    with pytest.raises(AssumptionViolated):
        construct_psi_member(one_step(clash, [0, 4.5]), 0.1)


def test_in_V():
    assert in_V(one_step(random_game(np.random.default_rng(0), 2), [0, 0]), [1.0, 1.5]) == (True, 0)


def _random_v_in_V(rng, game):
    N = game.num_players
    v = rng.uniform(-2 * game.r_max, 2 * game.r_max, N)
    if v.min() > 1:
        v[rng.integers(N)] = rng.uniform(-2 * game.r_max, 1)
    return v


def test_psi_succeeds_and_verifies_on_random_games(rng):
    for _ in range(200):
        N = int(rng.integers(1, 4))
        game = random_game(rng, N, solo_one=True)
        g = one_step(game, _random_v_in_V(rng, game))
        eps = float(rng.choice([0.05, 0.1, 0.3]))
        cert = construct_psi_member(g, eps)
        assert cert.valid
        assert verify_psi_certificate(g, cert).valid
        assert satisfies_assumption_two(g, cert.p_source)
        # the selected player's payoff only falls and never exceeds 1
        m = cert.m
        source = gamma_direct(game, g.v, cert.p_source)[m]
        assert cert.gamma_hat[m] <= source + 1e-12
        assert source <= 1 + 1e-9
