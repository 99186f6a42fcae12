from pathlib import Path

import numpy as np
import pytest

from quitgame import OneStepGame, QuittingGame, load_game

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def random_game(rng, N, low=-1.0, high=1.0, solo_one=False):
    table = rng.uniform(low, high, size=(1 << N, N))
    table[0] = 0.0
    if solo_one:
        for n in range(N):
            table[1 << n, n] = 1.0
    return QuittingGame(N, table)


def random_profile(rng, N, boundary=0.2):
    """Mixed profile with some coordinates pinned to 0 or 1."""
    p = rng.uniform(0, 1, N)
    pin = rng.uniform(0, 1, N) < boundary
    p[pin] = rng.integers(0, 2, pin.sum())
    return p


@pytest.fixture
def clash():
    return load_game(FIXTURES / "clash.json")


@pytest.fixture
def tight_shift():
    return load_game(FIXTURES / "tight_shift.json")


@pytest.fixture
def tight_perfect():
    return load_game(FIXTURES / "tight_perfect.json")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def one_step(game, v):
    return OneStepGame(game, np.asarray(v, dtype=float))


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
