"""One-step games: payoffs, epsilon-best replies, perfectness and equilibria.

Throughout, ``diff[n]`` is player ``n``'s gain from quitting for sure over
continuing for sure while everybody else keeps playing ``p``:
``payoff_with_pure_action(g, p, n, 1)[n] - payoff_with_pure_action(g, p, n, 0)[n]``.
Expected payoffs are linear in each player's own probability, so pure
deviations are the only ones that need checking.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .game import OneStepGame, check_profile
from .probability import coalition_masses

# slack used when re-checking inequalities
CHECK_TOL = 1e-10
NEAR_BOUNDARY = 1e-12


class Support(enum.Enum):
    AT_ZERO = "AtZero"
    INTERIOR = "Interior"
    AT_ONE = "AtOne"

    @classmethod
    def of(cls, pn: float) -> "Support":
        # exact comparison on purpose; see near_boundary_warnings
        if pn == 0.0:
            return cls.AT_ZERO
        if pn == 1.0:
            return cls.AT_ONE
        return cls.INTERIOR


@dataclass(frozen=True)
class GameConstants:
    r_max: float
    delta_v: float


@dataclass(frozen=True)
class PerfectnessReport:
    diffs: np.ndarray
    classes: tuple[Support, ...]
    violations: np.ndarray
    epsilon_star: float
    warnings: tuple[str, ...] = ()

    def is_perfect(self, eps: float, tol: float = 0.0) -> bool:
        return self.epsilon_star <= eps + tol


@dataclass(frozen=True)
class EquilibriumCertificate:
    current_values: np.ndarray
    best_pure_deviation_values: np.ndarray
    best_pure_deviation_actions: tuple[int, ...]
    gains: np.ndarray
    epsilon_star: float


@dataclass(frozen=True)
class ConversionReport:
    xi_p: float
    xi_per_player: np.ndarray
    equilibrium_epsilon: float
    perfectness_epsilon: float
    forward_holds: bool
    backward_holds: bool
    sharper_intervals: list = field(default_factory=list)
    sharper_holds: bool = True


def _profile(g: OneStepGame, p) -> np.ndarray:
    return check_profile(p, g.num_players)


def _stage_table(g: OneStepGame) -> np.ndarray:
    table = np.array(g.game.table)
    table[0] = g.v
    return table


def one_step_payoff(g: OneStepGame, p) -> np.ndarray:
    """Expected payoff vector of the one-step game under ``p``."""
    p = _profile(g, p)
    return coalition_masses(p) @ _stage_table(g)


def payoff_with_pure_action(g: OneStepGame, p, n: int, b: int) -> np.ndarray:
    """Payoff vector when player ``n`` plays pure action ``b`` (1 = quit) and the rest play ``p``."""
    if b not in (0, 1):
        raise ValueError(f"pure action must be 0 or 1, got {b!r}")
    q = np.array(_profile(g, p))
    q[n] = float(b)
    return coalition_masses(q) @ _stage_table(g)


def pure_action_payoffs(g: OneStepGame, p) -> tuple[np.ndarray, np.ndarray]:
    """Own payoffs from continuing and from quitting, one entry per player."""
    p = _profile(g, p)
    table = _stage_table(g)
    stay = np.empty(g.num_players)
    quit_ = np.empty(g.num_players)
    for n in range(g.num_players):
        q = np.array(p)
        q[n] = 0.0
        stay[n] = coalition_masses(q) @ table[:, n]
        q[n] = 1.0
        quit_[n] = coalition_masses(q) @ table[:, n]
    return stay, quit_


def quit_gains(g: OneStepGame, p) -> np.ndarray:
    stay, quit_ = pure_action_payoffs(g, p)
    return quit_ - stay


def near_boundary_warnings(p) -> tuple[str, ...]:
    out = []
    for n, pn in enumerate(p):
        if 0.0 < pn < NEAR_BOUNDARY:
            out.append(f"player {n + 1}: p={pn!r} is within {NEAR_BOUNDARY} of 0 but classified Interior")
        elif 0.0 < 1.0 - pn < NEAR_BOUNDARY:
            out.append(f"player {n + 1}: p={pn!r} is within {NEAR_BOUNDARY} of 1 but classified Interior")
    return tuple(out)


def support_violation(diff: float, cls: Support) -> float:
    """Smallest eps for which one player's supported actions are all eps-best replies."""
    if cls is Support.AT_ZERO:
        return max(0.0, diff)
    if cls is Support.AT_ONE:
        return max(0.0, -diff)
    return abs(diff)


def perfectness_report(g: OneStepGame, p) -> PerfectnessReport:
    p = _profile(g, p)
    diffs = quit_gains(g, p)
    classes = tuple(Support.of(pn) for pn in p)
    violations = np.array([support_violation(d, c) for d, c in zip(diffs, classes)])
    return PerfectnessReport(
        diffs=diffs,
        classes=classes,
        violations=violations,
        epsilon_star=float(violations.max(initial=0.0)),
        warnings=near_boundary_warnings(p),
    )


def equilibrium_certificate(g: OneStepGame, p) -> EquilibriumCertificate:
    p = _profile(g, p)
    current = one_step_payoff(g, p)
    stay, quit_ = pure_action_payoffs(g, p)
    # ties go to quitting, matching the repeated-game convention
    actions = tuple(int(q >= s) for s, q in zip(stay, quit_))
    best = np.maximum(stay, quit_)
    gains = best - current
    return EquilibriumCertificate(
        current_values=current,
        best_pure_deviation_values=best,
        best_pure_deviation_actions=actions,
        gains=gains,
        epsilon_star=float(max(0.0, gains.max())),
    )


def xi_factors(p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    out = np.ones(p.size)
    interior = (p > 0.0) & (p < 1.0)
    out[interior] = np.maximum(1.0 / p[interior], 1.0 / (1.0 - p[interior]))
    return out


def convert_certificates(g: OneStepGame, p, tol: float = CHECK_TOL) -> ConversionReport:
    """Check both directions linking eps-perfect profiles and eps-equilibria.

    Perfect at level eps implies an eps-equilibrium; an eps-equilibrium is
    ``eps * xi_p``-perfect. Also checks the per-player interval
    ``[-eps/p, eps/(1-p)]`` that holds for interior players.
    """
    p = _profile(g, p)
    perf = perfectness_report(g, p)
    eq = equilibrium_certificate(g, p)
    xi = xi_factors(p)
    xi_p = float(xi.max(initial=1.0))
    eps = eq.epsilon_star

    intervals = []
    sharper_ok = True
    for n, (pn, d, cls) in enumerate(zip(p, perf.diffs, perf.classes)):
        if cls is Support.AT_ZERO:
            lo, hi = -np.inf, eps
        elif cls is Support.AT_ONE:
            lo, hi = -eps, np.inf
        else:
            lo, hi = -eps / pn, eps / (1.0 - pn)
        ok = bool(lo - tol <= d <= hi + tol)
        sharper_ok &= ok
        intervals.append({"player": n, "low": float(lo), "high": float(hi), "diff": float(d), "holds": ok})

    return ConversionReport(
        xi_p=xi_p,
        xi_per_player=xi,
        equilibrium_epsilon=eps,
        perfectness_epsilon=perf.epsilon_star,
        forward_holds=bool(eps <= perf.epsilon_star + tol),
        backward_holds=bool(perf.epsilon_star <= xi_p * eps + tol),
        sharper_intervals=intervals,
        sharper_holds=sharper_ok,
    )


def game_constants(g: OneStepGame) -> GameConstants:
    r_max = g.game.r_max
    v_max = float(np.max(np.abs(g.v))) if g.v.size else 0.0
    return GameConstants(r_max=r_max, delta_v=max(v_max, r_max))
