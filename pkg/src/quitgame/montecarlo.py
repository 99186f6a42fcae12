"""Direct simulation of a quitting game, as an independent check on the analytic payoffs.

Trials are split into fixed-size blocks and block ``b`` draws from a Philox
stream keyed by ``(seed, b)``. A trial's outcome therefore depends only on
the seed and its index, never on how many worker threads ran the blocks.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .game import EventuallyCyclicProfile, QuittingGame

DEFAULT_HORIZON = 10_000
BLOCK_SIZE = 1 << 16


def _thread_cap() -> int:
    try:
        return max(1, int(os.environ.get("QG_THREADS", "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class SimulationSummary:
    trials: int
    mean_payoff: np.ndarray
    stderr: np.ndarray
    termination_rate: float
    quit_stage_histogram: dict
    seed: int
    horizon: int

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "seed": self.seed,
            "horizon": self.horizon,
            "mean_payoff": [float(x) for x in self.mean_payoff],
            "stderr": [float(x) for x in self.stderr],
            "termination_rate": self.termination_rate,
            "quit_stage_histogram": {str(k): v for k, v in sorted(self.quit_stage_histogram.items())},
        }


def _block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, block])))


def _run_block(game, pi, size, horizon, seed, block):
    rng = _block_rng(seed, block)
    N = game.num_players
    weights = 1 << np.arange(N)
    payoffs = np.zeros((size, N))
    stage = np.zeros(size, dtype=np.int64)
    alive = np.arange(size)
    k_pre = pi.prefix.shape[0]
    cycle_silent = not pi.cycle.any()
    for k in range(1, horizon + 1):
        if alive.size == 0:
            break
        p = pi.stage(k)
        if not p.any():
            if k > k_pre and cycle_silent:
                break
            continue
        quits = rng.random((alive.size, N)) < p
        coalition = quits @ weights
        done = coalition > 0
        idx = alive[done]
        payoffs[idx] = game.table[coalition[done]]
        stage[idx] = k
        alive = alive[~done]
    return payoffs, stage


def simulate(
    game: QuittingGame,
    pi: EventuallyCyclicProfile,
    trials: int,
    horizon: int = DEFAULT_HORIZON,
    seed: int = 0,
    threads: int | None = None,
) -> SimulationSummary:
    """Play ``trials`` independent games, censoring any still running after ``horizon`` stages.

    Censored games pay zero, like games that never end.
    """
    if trials < 1 or horizon < 1:
        raise ValueError("trials and horizon must be at least 1")
    if pi.num_players != game.num_players:
        raise ValueError("profile and game disagree on the number of players")
    sizes = [min(BLOCK_SIZE, trials - start) for start in range(0, trials, BLOCK_SIZE)]
    workers = threads or _thread_cap()

    def job(b):
        return _run_block(game, pi, sizes[b], horizon, seed, b)

    if workers > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(job, range(len(sizes))))
    else:
        results = [job(b) for b in range(len(sizes))]

    payoffs = np.concatenate([r[0] for r in results])
    stages = np.concatenate([r[1] for r in results])
    mean = payoffs.mean(axis=0)
    stderr = payoffs.std(axis=0, ddof=1) / np.sqrt(trials) if trials > 1 else np.zeros(game.num_players)
    ended = stages[stages > 0]
    values, counts = np.unique(ended, return_counts=True)
    return SimulationSummary(
        trials=trials,
        mean_payoff=mean,
        stderr=stderr,
        termination_rate=float(ended.size / trials),
        quit_stage_histogram={int(v): int(c) for v, c in zip(values, counts)},
        seed=int(seed),
        horizon=int(horizon),
    )
