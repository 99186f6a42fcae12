"""Quitting games, one-step games and strategy profiles.

Players are 0-indexed in the Python API and 1-indexed in files and reports.
A coalition is an ``int`` bitmask: bit ``n`` set means player ``n`` quits.
Payoff tables are indexed by that mask, so row 0 is the empty coalition
(identically zero) and rows are visited in ascending mask order whenever a
sum over coalitions is taken.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from .errors import (
    BadCoalition,
    BadPlayerCount,
    BadProfile,
    BadVectorLength,
    MissingCoalition,
    NonFiniteEntry,
    TooManyPlayers,
)

MAX_PLAYERS = 24


def parse_number(x) -> float:
    """Convert an int, float, decimal string or fraction string ("10/9") to float."""
    if isinstance(x, bool):
        raise NonFiniteEntry(f"not a number: {x!r}")
    if isinstance(x, (int, float)):
        value = float(x)
    elif isinstance(x, str):
        s = x.strip()
        try:
            value = float(Fraction(s))
        except (ValueError, ZeroDivisionError):
            try:
                value = float(s)
            except ValueError:
                raise NonFiniteEntry(f"not a number: {x!r}") from None
    else:
        raise NonFiniteEntry(f"not a number: {x!r}")
    if not math.isfinite(value):
        raise NonFiniteEntry(f"non-finite entry: {x!r}")
    return value


def parse_vector(values, length: int | None = None, what: str = "vector") -> np.ndarray:
    if isinstance(values, str):
        values = [s for s in values.split(",")]
    out = np.array([parse_number(x) for x in values], dtype=float)
    if length is not None and out.shape != (length,):
        raise BadVectorLength(f"{what} has length {out.size}, expected {length}")
    return out


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def coalition_mask(members: Iterable[int], one_indexed: bool = False) -> int:
    mask = 0
    for n in members:
        n = int(n) - (1 if one_indexed else 0)
        if n < 0:
            raise BadCoalition(f"bad player index in coalition {list(members)!r}")
        mask |= 1 << n
    return mask


def coalition_members(mask: int) -> tuple[int, ...]:
    """Players in the coalition, 0-indexed, ascending."""
    out = []
    n = 0
    while mask:
        if mask & 1:
            out.append(n)
        mask >>= 1
        n += 1
    return tuple(out)


def coalition_key(mask: int) -> str:
    """File-format key: sorted 1-indexed members joined by commas."""
    return ",".join(str(n + 1) for n in coalition_members(mask))


def parse_coalition_key(key, num_players: int) -> int:
    if isinstance(key, str):
        parts = [s.strip() for s in key.replace(" ", "").split(",") if s.strip()]
    else:
        parts = list(key)
    try:
        members = [int(s) for s in parts]
    except (TypeError, ValueError):
        raise BadCoalition(f"bad coalition key {key!r}") from None
    if not members:
        raise BadCoalition("the empty coalition is not stored; its payoff is zero")
    if len(set(members)) != len(members) or any(m < 1 or m > num_players for m in members):
        raise BadCoalition(f"bad coalition key {key!r} for {num_players} players")
    return coalition_mask(members, one_indexed=True)


@dataclass(frozen=True, eq=False)
class QuittingGame:
    """Payoff vector for every coalition of quitters.

    ``table[S]`` is the payoff vector when exactly coalition ``S`` quits;
    ``table[0]`` is the zero vector.
    """

    num_players: int
    table: np.ndarray

    def __post_init__(self):
        n = self.num_players
        if not isinstance(n, (int, np.integer)) or n < 1:
            raise BadPlayerCount(f"need at least one player, got {n!r}")
        if n > MAX_PLAYERS:
            raise TooManyPlayers(f"{n} players exceeds the limit of {MAX_PLAYERS}")
        table = np.array(self.table, dtype=float)
        if table.shape != (1 << n, n):
            raise BadVectorLength(f"payoff table has shape {table.shape}, expected {(1 << n, n)}")
        if not np.all(np.isfinite(table)):
            raise NonFiniteEntry("payoff table has non-finite entries")
        if np.any(table[0] != 0.0):
            raise BadCoalition("the empty coalition must pay zero")
        object.__setattr__(self, "num_players", int(n))
        object.__setattr__(self, "table", _frozen(table))

    @classmethod
    def from_payoffs(cls, payoffs: Mapping, num_players: int | None = None) -> "QuittingGame":
        """Build from ``{coalition: vector}``.

        Coalitions are 1-indexed member iterables or keys like ``"1,2"``.
        """
        if num_players is None:
            num_players = max(max(_members(k)) for k in payoffs)
        return validate_game({"players": num_players, "payoffs": payoffs})

    def payoff(self, coalition: int) -> np.ndarray:
        return self.table[coalition]

    def solo_payoff(self, n: int) -> float:
        """Payoff to player ``n`` when it quits alone."""
        return float(self.table[1 << n, n])

    @property
    def r_max(self) -> float:
        return float(np.max(np.abs(self.table[1:]))) if self.table.size else 0.0

    def to_dict(self) -> dict:
        return {
            "players": self.num_players,
            "payoffs": {
                coalition_key(s): [float(x) for x in self.table[s]]
                for s in range(1, 1 << self.num_players)
            },
        }

    def __eq__(self, other):
        if not isinstance(other, QuittingGame):
            return NotImplemented
        return self.num_players == other.num_players and np.array_equal(self.table, other.table)

    def __hash__(self):
        return hash((self.num_players, self.table.tobytes()))


def _members(key) -> list[int]:
    if isinstance(key, str):
        return [int(s) for s in key.split(",") if s.strip()]
    return [int(s) for s in key]


def validate_game(raw: Mapping) -> QuittingGame:
    """Validate a parsed game description (``{"players": N, "payoffs": {...}}``)."""
    if not isinstance(raw, Mapping) or "players" not in raw or "payoffs" not in raw:
        raise MissingCoalition("game description needs 'players' and 'payoffs'")
    players = raw["players"]
    if isinstance(players, bool) or not isinstance(players, int):
        raise BadPlayerCount(f"'players' must be an integer, got {players!r}")
    if players < 1:
        raise BadPlayerCount(f"need at least one player, got {players}")
    if players > MAX_PLAYERS:
        raise TooManyPlayers(f"{players} players exceeds the limit of {MAX_PLAYERS}")
    table = np.zeros((1 << players, players))
    seen = set()
    for key, vec in raw["payoffs"].items():
        mask = parse_coalition_key(key, players)
        if mask in seen:
            raise BadCoalition(f"coalition {coalition_key(mask)} given twice")
        seen.add(mask)
        table[mask] = parse_vector(vec, players, what=f"payoff of {{{coalition_key(mask)}}}")
    missing = (1 << players) - 1 - len(seen)
    if missing:
        first = next(s for s in range(1, 1 << players) if s not in seen)
        raise MissingCoalition(f"{missing} coalition(s) missing, e.g. {{{coalition_key(first)}}}")
    return QuittingGame(players, table)


@dataclass(frozen=True, eq=False)
class OneStepGame:
    """A quitting game played once, paying ``v`` if nobody quits."""

    game: QuittingGame
    v: np.ndarray

    def __post_init__(self):
        v = parse_vector(self.v, self.game.num_players, what="v")
        object.__setattr__(self, "v", _frozen(v))

    @property
    def num_players(self) -> int:
        return self.game.num_players

    def __eq__(self, other):
        if not isinstance(other, OneStepGame):
            return NotImplemented
        return self.game == other.game and np.array_equal(self.v, other.v)

    __hash__ = None


def check_profile(p, num_players: int) -> np.ndarray:
    """Validate one stage's quit probabilities; returns a float array."""
    try:
        arr = parse_vector(p, num_players, what="profile")
    except NonFiniteEntry as e:
        raise BadProfile(str(e)) from None
    if np.any(arr < 0.0) or np.any(arr > 1.0):
        raise BadProfile(f"quit probabilities must lie in [0, 1], got {arr.tolist()}")
    return arr


def _stage_array(stages, num_players: int | None, what: str) -> np.ndarray:
    stages = list(stages)
    if not stages:
        return np.zeros((0, num_players or 0))
    if num_players is None:
        num_players = len(stages[0])
    return np.array([check_profile(s, num_players) for s in stages]).reshape(len(stages), num_players)


@dataclass(frozen=True, eq=False)
class EventuallyCyclicProfile:
    """Finite prefix of stage profiles followed by a cycle repeated forever.

    Row ``k`` of ``prefix``/``cycle`` holds every player's quit probability
    at that stage.
    """

    prefix: np.ndarray
    cycle: np.ndarray

    def __post_init__(self):
        cycle = _stage_array(self.cycle, None, "cycle")
        if cycle.shape[0] < 1:
            raise BadProfile("the cycle needs at least one stage")
        n = cycle.shape[1]
        prefix = _stage_array(self.prefix, n, "prefix")
        if prefix.shape[1] != n:
            raise BadVectorLength("prefix and cycle disagree on the number of players")
        object.__setattr__(self, "prefix", _frozen(prefix))
        object.__setattr__(self, "cycle", _frozen(cycle))

    @classmethod
    def stationary(cls, p) -> "EventuallyCyclicProfile":
        return cls(prefix=[], cycle=[p])

    @property
    def num_players(self) -> int:
        return self.cycle.shape[1]

    @property
    def period(self) -> int:
        return self.cycle.shape[0]

    @property
    def num_stage_classes(self) -> int:
        """Distinct stages before repetition: prefix length plus period."""
        return self.prefix.shape[0] + self.cycle.shape[0]

    def stage(self, k: int) -> np.ndarray:
        """Profile played at stage ``k`` (stages count from 1)."""
        if k < 1:
            raise ValueError(f"stages count from 1, got {k}")
        i = k - 1
        if i < self.prefix.shape[0]:
            return self.prefix[i]
        return self.cycle[(i - self.prefix.shape[0]) % self.period]

    def stages(self, count: int) -> np.ndarray:
        return np.array([self.stage(k) for k in range(1, count + 1)])

    @property
    def is_stationary(self) -> bool:
        return self.prefix.shape[0] == 0 and self.period == 1

    @property
    def is_pure(self) -> bool:
        both = np.concatenate([self.prefix, self.cycle])
        return bool(np.all((both == 0.0) | (both == 1.0)))

    def with_player(self, n: int, prefix_probs, cycle_probs) -> "EventuallyCyclicProfile":
        """Replace player ``n``'s strategy, keeping everyone else's."""
        prefix = np.array(self.prefix)
        cycle = np.array(self.cycle)
        prefix[:, n] = prefix_probs
        cycle[:, n] = cycle_probs
        return EventuallyCyclicProfile(prefix, cycle)

    def to_dict(self) -> dict:
        return {
            "prefix": [[float(x) for x in row] for row in self.prefix],
            "cycle": [[float(x) for x in row] for row in self.cycle],
        }

    @classmethod
    def from_dict(cls, raw: Mapping, num_players: int | None = None) -> "EventuallyCyclicProfile":
        if "cycle" not in raw:
            raise BadProfile("profile needs a 'cycle'")
        prefix = raw.get("prefix", [])
        cycle = raw["cycle"]
        if num_players is not None:
            for row in list(prefix) + list(cycle):
                if len(row) != num_players:
                    raise BadVectorLength(f"stage {row!r} has length {len(row)}, expected {num_players}")
        return cls(prefix=prefix, cycle=cycle)

    def __eq__(self, other):
        if not isinstance(other, EventuallyCyclicProfile):
            return NotImplemented
        return np.array_equal(self.prefix, other.prefix) and np.array_equal(self.cycle, other.cycle)

    __hash__ = None


def subgame_profile(pi: EventuallyCyclicProfile, j: int) -> EventuallyCyclicProfile:
    """Profile of the subgame starting at stage ``j`` (first ``j - 1`` stages dropped)."""
    if j < 1:
        raise ValueError(f"stages count from 1, got {j}")
    drop = j - 1
    k = pi.prefix.shape[0]
    if drop <= k:
        return EventuallyCyclicProfile(pi.prefix[drop:], pi.cycle)
    shift = (drop - k) % pi.period
    return EventuallyCyclicProfile(np.zeros((0, pi.num_players)), np.roll(pi.cycle, -shift, axis=0))


def load_game(path) -> QuittingGame:
    return validate_game(json.loads(Path(path).read_text()))


def load_profile(path, num_players: int | None = None) -> EventuallyCyclicProfile:
    return EventuallyCyclicProfile.from_dict(json.loads(Path(path).read_text()), num_players)


def dumps_game(game: QuittingGame) -> str:
    return json.dumps(game.to_dict())
