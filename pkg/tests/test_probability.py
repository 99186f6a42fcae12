import itertools

import numpy as np
import pytest
from conftest import random_profile
from hypothesis import given, settings
from hypothesis import strategies as st

from quitgame import TooManyPlayers, coalition_distribution, rho, rho_decompose
from quitgame.probability import coalition_masses

probs = st.lists(st.floats(0, 1), min_size=1, max_size=6)


def _rho_oracle(p, S):
    """Direct product over players with exact set membership."""
    out = 1.0
    for n, pn in enumerate(p):
        out *= pn if (S >> n) & 1 else 1 - pn
    return out


def test_worked_values():
    assert rho([0.1, 0.0], 0) == pytest.approx(0.9, abs=1e-15)
    assert rho([0.1, 0.5, 0.1], 0b011) == pytest.approx(0.1 * 0.5 * 0.9, abs=1e-15)


@settings(max_examples=200, deadline=None)
@given(probs)
def test_masses_match_oracle_and_sum_to_one(p):
    mass = coalition_masses(p)
    assert abs(mass.sum() - 1.0) <= 1e-12
    for S in range(1 << len(p)):
        assert mass[S] == pytest.approx(_rho_oracle(p, S), abs=1e-15)


def test_decomposition_random(rng):
    for _ in range(1000):
        N = int(rng.integers(1, 7))
        p = random_profile(rng, N)
        S = int(rng.integers(0, 1 << N))
        i = int(rng.integers(0, N))
        a, b = rho_decompose(p, S, i)
        assert abs(a + b - rho(p, S)) <= 1e-12


@settings(max_examples=200, deadline=None)
@given(probs, st.data())
def test_zero_exactly_when_a_member_cannot_act(p, data):
    S = data.draw(st.integers(0, (1 << len(p)) - 1))
    members_ok = all(p[n] > 0 for n in range(len(p)) if (S >> n) & 1)
    others_ok = all(p[n] < 1 for n in range(len(p)) if not (S >> n) & 1)
    expected_positive = members_ok and others_ok
    # tiny products can underflow; restrict the check to ordinary magnitudes
    if expected_positive and _rho_oracle(p, S) < 1e-300:
        return
    assert (rho(p, S) > 0) == expected_positive


def test_distribution_view():
    d = coalition_distribution([0.5, 0.25])
    assert d.total == pytest.approx(1.0)
    assert dict(d.items())[(0, 1)] == pytest.approx(0.125)
    assert d[0] == pytest.approx(0.375)


def test_player_cap():
    with pytest.raises(TooManyPlayers):
        coalition_masses(np.zeros(25))


def test_pure_profiles_are_point_masses():
    for bits in itertools.product([0, 1], repeat=3):
        mass = coalition_masses(bits)
        S = sum(b << n for n, b in enumerate(bits))
        assert mass[S] == 1.0 and mass.sum() == 1.0
