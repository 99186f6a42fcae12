"""Payoffs and equilibrium checks for eventually-cyclic profiles of the full game.

Per stage ``k`` let ``c_k`` be the probability nobody quits and ``u_k`` the
expected payoff collected if somebody does. The game's payoff is
``sum_k (c_1 ... c_{k-1}) u_k``; over a cycle with ``C = prod c_k < 1`` the
tail is a geometric series. A game that never ends pays zero.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceFailure
from .game import EventuallyCyclicProfile, QuittingGame, subgame_profile
from .probability import coalition_masses

BELLMAN_TOL = 1e-10
TIE_TOL = 1e-12
MAX_POLICY_ROUNDS = 10_000


@dataclass(frozen=True)
class RepeatedPayoffResult:
    payoff: np.ndarray
    termination_prob: float
    per_cycle_continue: float
    prefix_continue: float


@dataclass(frozen=True)
class TruncatedPayoff:
    payoff: np.ndarray
    tail_bound: float
    continue_prob: float
    horizon: int


@dataclass(frozen=True)
class DeviationResult:
    player: int
    best_value: float
    prefix_policy: tuple[int, ...]
    cycle_policy: tuple[int, ...]
    prefix_values: np.ndarray
    cycle_values: np.ndarray
    bellman_residual: float

    @property
    def best_policy(self) -> tuple[int, ...]:
        """Pure action per stage class, prefix first; 1 = quit."""
        return self.prefix_policy + self.cycle_policy


@dataclass(frozen=True)
class RepeatedCertificate:
    payoff: np.ndarray
    best_values: np.ndarray
    gaps: np.ndarray
    epsilon_star: float
    deviations: tuple[DeviationResult, ...]


@dataclass(frozen=True)
class SubgameCertificate:
    epsilon_star: float
    per_shift: tuple[float, ...]
    worst_shift: int


def stage_terms(game: QuittingGame, stages: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Continue probabilities ``c`` and absorption payoffs ``u`` for each stage row."""
    stages = np.asarray(stages, dtype=float).reshape(-1, game.num_players)
    c = np.empty(len(stages))
    u = np.empty((len(stages), game.num_players))
    for k, p in enumerate(stages):
        mass = coalition_masses(p)
        c[k] = mass[0]
        u[k] = mass[1:] @ game.table[1:]
    return c, u


def repeated_payoff(game: QuittingGame, pi: EventuallyCyclicProfile) -> RepeatedPayoffResult:
    c_pre, u_pre = stage_terms(game, pi.prefix)
    c_cyc, u_cyc = stage_terms(game, pi.cycle)

    payoff = np.zeros(game.num_players)
    reach = 1.0
    for c, u in zip(c_pre, u_pre):
        payoff += reach * u
        reach *= c

    per_cycle = float(np.prod(c_cyc))
    if per_cycle < 1.0:
        weights = np.concatenate([[1.0], np.cumprod(c_cyc)[:-1]])
        payoff += reach * (weights @ u_cyc) / (1.0 - per_cycle)
        termination = 1.0
    else:
        # every cycle stage continues surely, so u_cyc is zero
        termination = 1.0 - reach
    return RepeatedPayoffResult(payoff, termination, per_cycle, reach)


def truncated_payoff(game: QuittingGame, pi: EventuallyCyclicProfile, horizon: int) -> TruncatedPayoff:
    """Partial sum of the payoff series over the first ``horizon`` stages.

    ``tail_bound`` bounds the distance to the infinite sum in every component.
    """
    if horizon < 1:
        raise ValueError(f"horizon must be at least 1, got {horizon}")
    classes = pi.num_stage_classes
    c_all, u_all = stage_terms(game, pi.stages(min(horizon, classes)))
    payoff = np.zeros(game.num_players)
    reach = 1.0
    k_pre = pi.prefix.shape[0]
    for k in range(horizon):
        if k < classes:
            i = k
        else:
            i = k_pre + (k - k_pre) % pi.period
        payoff += reach * u_all[i]
        reach *= c_all[i]
    reach = float(reach)
    return TruncatedPayoff(payoff, reach * game.r_max, reach, horizon)


def deviation_terms(game: QuittingGame, stages: np.ndarray, n: int):
    """What player ``n`` faces each stage while the others follow ``stages``.

    Returns ``(Q, A, B)``: ``Q`` is n's expected payoff from quitting now,
    ``A`` its expected payoff if it continues and someone else quits, ``B``
    the probability that nobody else quits.
    """
    stages = np.asarray(stages, dtype=float).reshape(-1, game.num_players)
    bit = 1 << n
    masks = np.arange(1 << game.num_players)
    with_n = game.table[masks | bit, n]
    without_n = game.table[:, n]
    Q = np.empty(len(stages))
    A = np.empty(len(stages))
    B = np.empty(len(stages))
    for k, p in enumerate(stages):
        q = np.array(p)
        q[n] = 0.0
        mass = coalition_masses(q)
        Q[k] = mass @ with_n
        A[k] = mass[1:] @ without_n[1:]
        B[k] = mass[0]
    return Q, A, B


def _evaluate_cycle(Q, A, B, quit_):
    """Values of a fixed stationary-per-class policy on the cycle."""
    L = len(Q)
    if not quit_.any():
        C = float(np.prod(B))
        if C >= 1.0:
            return np.zeros(L)
        V = np.empty(L)
        for k in range(L):
            idx = [(k + i) % L for i in range(L)]
            w = np.concatenate([[1.0], np.cumprod(B[idx])[:-1]])
            V[k] = (w @ A[idx]) / (1.0 - C)
        return V
    V = np.empty(L)
    start = int(np.flatnonzero(quit_)[-1])
    # fold backwards from a quitting stage, whose value is fixed
    nxt = Q[start]
    V[start] = nxt
    for step in range(1, L):
        k = (start - step) % L
        nxt = Q[k] if quit_[k] else A[k] + B[k] * nxt
        V[k] = nxt
    return V


def _solve_cycle(Q, A, B):
    L = len(Q)
    if float(np.prod(B)) >= 1.0:
        # nobody else ever quits: wait for the best moment to quit, or never quit
        best = max(0.0, float(Q.max()))
        return np.full(L, best)
    quit_ = np.ones(L, dtype=bool)
    for _ in range(MAX_POLICY_ROUNDS):
        V = _evaluate_cycle(Q, A, B, quit_)
        cont = A + B * np.roll(V, -1)
        better = np.where(quit_, cont > Q + TIE_TOL, Q > cont + TIE_TOL)
        if not better.any():
            return V
        quit_ = quit_ ^ better
    raise ConvergenceFailure("policy iteration did not settle on the cycle")


def best_response(game: QuittingGame, pi: EventuallyCyclicProfile, n: int) -> DeviationResult:
    """Player ``n``'s best deviation value against the others' part of ``pi``.

    Solves ``V_k = max(Q_k, A_k + B_k V_{k+1})`` over the stage classes;
    policy iteration on the cycle, then backward induction through the
    prefix. Deviations are pure and repeat with the cycle.
    """
    Qc, Ac, Bc = deviation_terms(game, pi.cycle, n)
    Vc = _solve_cycle(Qc, Ac, Bc)
    Qp, Ap, Bp = deviation_terms(game, pi.prefix, n)
    Vp = np.empty(len(Qp))
    nxt = Vc[0]
    for k in range(len(Qp) - 1, -1, -1):
        nxt = max(Qp[k], Ap[k] + Bp[k] * nxt)
        Vp[k] = nxt

    Q = np.concatenate([Qp, Qc])
    A = np.concatenate([Ap, Ac])
    B = np.concatenate([Bp, Bc])
    V = np.concatenate([Vp, Vc])
    V_next = np.concatenate([Vp[1:], Vc[:1], np.roll(Vc, -1)]) if len(Vp) else np.roll(Vc, -1)
    cont = A + B * V_next
    residual = float(np.max(np.abs(V - np.maximum(Q, cont))))
    if residual > BELLMAN_TOL:
        raise ConvergenceFailure(f"Bellman residual {residual:g} too large", residual)
    policy = tuple(int(q >= c - TIE_TOL) for q, c in zip(Q, cont))
    k = len(Qp)
    return DeviationResult(
        player=n,
        best_value=float(V[0]),
        prefix_policy=policy[:k],
        cycle_policy=policy[k:],
        prefix_values=Vp,
        cycle_values=Vc,
        bellman_residual=residual,
    )


def equilibrium_certificate_repeated(game: QuittingGame, pi: EventuallyCyclicProfile) -> RepeatedCertificate:
    payoff = repeated_payoff(game, pi).payoff
    devs = tuple(best_response(game, pi, n) for n in range(game.num_players))
    best = np.array([d.best_value for d in devs])
    gaps = best - payoff
    return RepeatedCertificate(payoff, best, gaps, float(max(0.0, gaps.max())), devs)


def subgame_certificate(game: QuittingGame, pi: EventuallyCyclicProfile) -> SubgameCertificate:
    """Worst equilibrium gap over every subgame; later shifts repeat earlier ones."""
    per_shift = tuple(
        equilibrium_certificate_repeated(game, subgame_profile(pi, j)).epsilon_star
        for j in range(1, pi.num_stage_classes + 1)
    )
    worst = int(np.argmax(per_shift))
    return SubgameCertificate(per_shift[worst], per_shift, worst + 1)
