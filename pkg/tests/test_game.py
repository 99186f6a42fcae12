import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quitgame import (
    BadCoalition,
    BadPlayerCount,
    BadProfile,
    BadVectorLength,
    EventuallyCyclicProfile,
    MissingCoalition,
    NonFiniteEntry,
    QuittingGame,
    TooManyPlayers,
    check_profile,
    coalition_key,
    coalition_mask,
    coalition_members,
    subgame_profile,
    validate_game,
)
from quitgame.game import dumps_game, parse_coalition_key, parse_number


def test_validate_reads_example_game(clash):
    assert clash.num_players == 2
    np.testing.assert_array_equal(clash.payoff(0b01), [1, -1])
    np.testing.assert_array_equal(clash.payoff(0b11), [-2, -2])
    assert clash.r_max == 2.0


def test_fractions_are_exact():
    assert parse_number("10/9") == 10 / 9
    assert parse_number("0.25") == 0.25


def test_missing_coalition_is_rejected():
    with pytest.raises(MissingCoalition):
        validate_game({"players": 2, "payoffs": {"1": [1, 0], "2": [0, 1]}})


@pytest.mark.parametrize(
    "raw, err",
    [
        ({"players": 0, "payoffs": {}}, BadPlayerCount),
        ({"players": 25, "payoffs": {}}, TooManyPlayers),
        ({"players": 1, "payoffs": {"2": [1]}}, BadCoalition),
        ({"players": 1, "payoffs": {"1": [float("nan")]}}, NonFiniteEntry),
    ],
)
def test_bad_games(raw, err):
    with pytest.raises(err):
        validate_game(raw)


def test_coalition_helpers_round_trip():
    for mask in range(1, 64):
        members = coalition_members(mask)
        assert coalition_mask(members) == mask
        assert parse_coalition_key(coalition_key(mask), 6) == mask


def test_game_serialization_round_trip(tight_perfect):
    again = validate_game(json.loads(dumps_game(tight_perfect)))
    assert again == tight_perfect


def test_table_is_read_only(clash):
    with pytest.raises(ValueError):
        clash.table[1, 0] = 5.0


def test_profile_bounds():
    with pytest.raises(BadProfile):
        check_profile([0.5, 1.2], 2)
    with pytest.raises(BadVectorLength):
        check_profile([0.5], 2)


def _naive_shift(pi, j, count):
    """Stages j, j+1, ... of pi, read off the unrolled sequence."""
    return pi.stages(j - 1 + count)[j - 1:]


@settings(max_examples=100, deadline=None)
@given(
    prefix_len=st.integers(0, 3),
    period=st.integers(1, 4),
    seed=st.integers(0, 2**32 - 1),
)
def test_subgame_profile_matches_naive_shift(prefix_len, period, seed):
    rng = np.random.default_rng(seed)
    pi = EventuallyCyclicProfile(rng.uniform(size=(prefix_len, 2)), rng.uniform(size=(period, 2)))
    for j in range(1, 3 * pi.num_stage_classes + 1):
        shifted = subgame_profile(pi, j)
        np.testing.assert_array_equal(shifted.stages(12), _naive_shift(pi, j, 12))


def test_profile_dict_round_trip():
    pi = EventuallyCyclicProfile([[1, 0]], [[0, 0.3], [0.2, 0]])
    assert EventuallyCyclicProfile.from_dict(pi.to_dict(), 2) == pi
    assert pi.period == 2 and pi.num_stage_classes == 3
    np.testing.assert_array_equal(pi.stage(4), [0, 0.3])


def test_from_payoffs_matches_table():
    g = QuittingGame.from_payoffs({"1": [1.0]}, num_players=1)
    assert g.solo_payoff(0) == 1.0
    np.testing.assert_array_equal(g.table, [[0.0], [1.0]])
