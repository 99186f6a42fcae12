"""Pushing one player's quit probability toward 1 and what that does to a one-step game."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BadLambda, NotEtaPerfect
from .game import OneStepGame, check_profile
from .one_step import (
    CHECK_TOL,
    game_constants,
    one_step_payoff,
    payoff_with_pure_action,
    perfectness_report,
)
from .probability import rho


def perturb(p, m: int, lam: float) -> np.ndarray:
    """Return ``p`` with ``p[m]`` replaced by ``(1 - lam) * p[m] + lam``."""
    lam = float(lam)
    if not 0.0 <= lam <= 1.0:
        raise BadLambda(f"lambda must lie in [0, 1], got {lam}")
    p = check_profile(p, len(p))
    if not 0 <= m < p.size:
        raise IndexError(f"no player {m} in a {p.size}-player profile")
    out = p.copy()
    out[m] = (1.0 - lam) * p[m] + lam
    return out


@dataclass(frozen=True)
class PerturbationReport:
    p_hat: np.ndarray
    player: int
    lam: float
    eta: float
    eta_verified: float
    continue_prob: float
    continue_prob_hat: float
    continue_prob_ratio: float
    payoff_mix_residual: float
    payoff_shift: float
    shift_bound: float
    eta_tilde: float
    p_hat_epsilon: float
    p_hat_diffs: np.ndarray
    item4_scope: str
    item4_holds: bool

    @property
    def item1_holds(self) -> bool:
        return abs(self.continue_prob_hat - (1.0 - self.lam) * self.continue_prob) <= 1e-12

    @property
    def item2_holds(self) -> bool:
        return self.payoff_mix_residual <= CHECK_TOL

    @property
    def item3_holds(self) -> bool:
        return self.payoff_shift <= self.shift_bound + CHECK_TOL


def theorem1_report(g: OneStepGame, p, m: int, lam: float, eta: float) -> PerturbationReport:
    """Perturb player ``m`` by ``lam`` and measure every consequence.

    ``eta`` is the claimed perfectness level of ``p``; it is re-checked and
    ``NotEtaPerfect`` is raised if ``p`` misses it by more than 1e-10.

    When ``p[m] > 0`` the report checks that the perturbed profile is
    ``eta_tilde``-perfect for every player (``item4_scope == "full"``).
    When ``p[m] == 0`` no two-sided bound exists for player ``m``, so only the
    other players are checked (``item4_scope == "partial"``).
    """
    p = check_profile(p, g.num_players)
    if eta < 0:
        raise ValueError(f"eta must be non-negative, got {eta}")
    base = perfectness_report(g, p)
    if base.epsilon_star > eta + CHECK_TOL:
        raise NotEtaPerfect(f"profile is only {base.epsilon_star!r}-perfect, not {eta!r}-perfect")

    p_hat = perturb(p, m, lam)
    consts = game_constants(g)

    gamma = one_step_payoff(g, p)
    gamma_hat = one_step_payoff(g, p_hat)
    gamma_quit = payoff_with_pure_action(g, p, m, 1)
    mixed = (1.0 - lam) * gamma + lam * gamma_quit

    c = rho(p, 0)
    c_hat = rho(p_hat, 0)
    ratio = c_hat / c if c > 0 else float("nan")

    eta_tilde = max(2.0 * lam * consts.r_max + (1.0 - lam) * eta, eta)
    hat = perfectness_report(g, p_hat)
    if p[m] > 0.0:
        scope = "full"
        holds = hat.epsilon_star <= eta_tilde + CHECK_TOL
    else:
        scope = "partial"
        others = np.delete(hat.violations, m)
        holds = bool(others.max(initial=0.0) <= eta_tilde + CHECK_TOL)

    return PerturbationReport(
        p_hat=p_hat,
        player=m,
        lam=float(lam),
        eta=float(eta),
        eta_verified=base.epsilon_star,
        continue_prob=c,
        continue_prob_hat=c_hat,
        continue_prob_ratio=ratio,
        payoff_mix_residual=float(np.max(np.abs(gamma_hat - mixed))),
        payoff_shift=float(np.max(np.abs(gamma_hat - gamma))),
        shift_bound=lam * (consts.r_max + consts.delta_v),
        eta_tilde=eta_tilde,
        p_hat_epsilon=hat.epsilon_star,
        p_hat_diffs=hat.diffs,
        item4_scope=scope,
        item4_holds=bool(holds),
    )
