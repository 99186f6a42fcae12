"""Probability that exactly a given coalition quits, for independent players."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import TooManyPlayers
from .game import MAX_PLAYERS, coalition_members


def rho(p, S: int) -> float:
    """Probability that exactly the players in mask ``S`` quit under ``p``.

    Factors are multiplied in ascending player order.
    """
    out = 1.0
    for n, pn in enumerate(p):
        out *= pn if (S >> n) & 1 else 1.0 - pn
    return float(out)


def coalition_masses(p) -> np.ndarray:
    """``rho(p, S)`` for every mask ``S``, as an array of length ``2**N``."""
    p = np.asarray(p, dtype=float)
    if p.size > MAX_PLAYERS:
        raise TooManyPlayers(f"{p.size} players exceeds the limit of {MAX_PLAYERS}")
    mass = np.ones(1)
    for pn in p:
        # players are appended as the next-higher bit
        mass = np.concatenate([mass * (1.0 - pn), mass * pn])
    return mass


@dataclass(frozen=True)
class CoalitionDistribution:
    num_players: int
    mass: np.ndarray

    def __getitem__(self, S: int) -> float:
        return float(self.mass[S])

    def items(self):
        """``(members, mass)`` pairs with 0-indexed member tuples, ascending by mask."""
        return [(coalition_members(S), float(m)) for S, m in enumerate(self.mass)]

    @property
    def total(self) -> float:
        return float(self.mass.sum())


def coalition_distribution(p) -> CoalitionDistribution:
    mass = coalition_masses(p)
    mass.setflags(write=False)
    return CoalitionDistribution(len(p), mass)


def rho_decompose(p, S: int, i: int) -> tuple[float, float]:
    """Split ``rho(p, S)`` on player ``i``'s action.

    Returns ``(p[i] * rho((p^-i, 1), S), (1 - p[i]) * rho((p^-i, 0), S))``;
    the two terms sum to ``rho(p, S)``.
    """
    p = np.array(p, dtype=float)
    quit_ = p.copy()
    quit_[i] = 1.0
    stay = p.copy()
    stay[i] = 0.0
    return p[i] * rho(quit_, S), (1.0 - p[i]) * rho(stay, S)
