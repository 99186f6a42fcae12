"""Equilibria of one-step games and the perturbation step that certifies psi_eps(v) is non-empty.

``find_one_step_equilibrium`` enumerates supports: every player is fixed at
0, fixed at 1, or mixing. A mixing player must be indifferent, and its
quit gain is multilinear in the other mixers' probabilities, so up to three
mixers the indifference system is solved in closed form (linear, then a
quadratic). Larger mixing sets fall back to Newton's method from a grid of
starting points.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .errors import (
    AssumptionViolated,
    BadEpsilon,
    NoEquilibriumFound,
    NoQualifyingPlayer,
    TooManyPlayers,
)
from .game import OneStepGame, check_profile
from .one_step import (
    Support,
    equilibrium_certificate,
    game_constants,
    one_step_payoff,
    perfectness_report,
    quit_gains,
    support_violation,
)
from .perturbation import perturb
from .probability import coalition_masses, rho

MAX_EXHAUSTIVE_PLAYERS = 5
FIND_TOL = 1e-10
DEDUP_TOL = 1e-6
CERT_SLACK = 1e-9
ROOT_TOL = 1e-12


def _own_gain(table: np.ndarray, q: np.ndarray, n: int) -> float:
    q = q.copy()
    q[n] = 1.0
    quit_ = coalition_masses(q) @ table[:, n]
    q[n] = 0.0
    return float(quit_ - coalition_masses(q) @ table[:, n])


def _multilinear_coeffs(table, base, n, variables) -> np.ndarray:
    """Coefficients of player n's quit gain as a multilinear polynomial.

    ``coef[T]`` multiplies the product of the probabilities of the variables
    whose bits are set in ``T``.
    """
    k = len(variables)
    coef = np.empty(1 << k)
    for corner in range(1 << k):
        q = base.copy()
        for j, var in enumerate(variables):
            q[var] = float((corner >> j) & 1)
        coef[corner] = _own_gain(table, q, n)
    for j in range(k):
        for T in range(1 << k):
            if (T >> j) & 1:
                coef[T] -= coef[T ^ (1 << j)]
    return coef


def _pure_conditions_hold(gains, base, mixing, tol) -> bool:
    for n, g in enumerate(gains):
        if n in mixing:
            continue
        cls = Support.AT_ONE if base[n] == 1.0 else Support.AT_ZERO
        if support_violation(g, cls) > tol:
            return False
    return True


def _newton_polish(table, p, mixing, steps=4):
    """A few Newton steps on the indifference equations of the mixing players."""
    mixing = list(mixing)
    for _ in range(steps):
        F = np.array([_own_gain(table, p, n) for n in mixing])
        if np.max(np.abs(F)) <= 1e-15:
            break
        J = np.zeros((len(mixing), len(mixing)))
        for a, n in enumerate(mixing):
            for b, j in enumerate(mixing):
                if j == n:
                    continue
                hi = p.copy()
                hi[j] = 1.0
                lo = p.copy()
                lo[j] = 0.0
                J[a, b] = _own_gain(table, hi, n) - _own_gain(table, lo, n)
        try:
            step = np.linalg.solve(J, F)
        except np.linalg.LinAlgError:
            break
        trial = p.copy()
        trial[mixing] -= step
        if np.any(trial[mixing] <= 0.0) or np.any(trial[mixing] >= 1.0):
            break
        F_new = np.array([_own_gain(table, trial, n) for n in mixing])
        if np.max(np.abs(F_new)) >= np.max(np.abs(F)):
            break
        p = trial
    return p


def _one_mixer(table, base, n):
    """Player n mixes alone: its gain is a constant that must vanish."""
    c = _multilinear_coeffs(table, base, n, [])[0]
    if abs(c) > ROOT_TOL:
        return []
    lo, hi = 0.0, 1.0
    N = len(base)
    for j in range(N):
        if j == n:
            continue
        a, b = _multilinear_coeffs(table, base, j, [n])
        # at 0 we need a + b t <= 0, at 1 we need a + b t >= 0
        sign = 1.0 if base[j] == 0.0 else -1.0
        a, b = sign * a, sign * b
        if b > 0:
            hi = min(hi, -a / b)
        elif b < 0:
            lo = max(lo, -a / b)
        elif a > ROOT_TOL:
            return []
    lo, hi = max(lo, 0.0), min(hi, 1.0)
    if lo > hi or hi <= 0.0 or lo >= 1.0:
        return []
    q = base.copy()
    q[n] = 0.5 * (lo + hi)
    return [q]


def _two_mixers(table, base, a, b):
    ca = _multilinear_coeffs(table, base, a, [b])
    cb = _multilinear_coeffs(table, base, b, [a])
    if ca[1] == 0.0 or cb[1] == 0.0:
        return []
    q = base.copy()
    q[b] = -ca[0] / ca[1]
    q[a] = -cb[0] / cb[1]
    return [q]


def _three_mixers(table, base, a, b, c):
    # gain_a = a0 + a1*pb + a2*pc + a3*pb*pc, and likewise for b (in pa, pc) and c (in pa, pb)
    al = _multilinear_coeffs(table, base, a, [b, c])
    be = _multilinear_coeffs(table, base, b, [a, c])
    ga = _multilinear_coeffs(table, base, c, [a, b])
    P = np.polynomial.Polynomial
    num_b, den_b = P([al[0], al[2]]), P([al[1], al[3]])  # pb = -num_b / den_b
    num_a, den_a = P([be[0], be[2]]), P([be[1], be[3]])  # pa = -num_a / den_a
    poly = ga[0] * den_a * den_b - ga[1] * num_a * den_b - ga[2] * num_b * den_a + ga[3] * num_a * num_b
    coef = poly.trim().coef
    if coef.size == 1:
        return []
    out = []
    for z in poly.roots():
        if abs(z.imag) > 1e-9:
            continue
        z = z.real
        da, db = den_a(z), den_b(z)
        if da == 0.0 or db == 0.0:
            continue
        q = base.copy()
        q[c] = z
        q[a] = -num_a(z) / da
        q[b] = -num_b(z) / db
        out.append(q)
    return out


def _many_mixers(table, base, mixing):
    mixing = list(mixing)
    k = len(mixing)
    # each mixer's gain as a multilinear polynomial in the other mixers
    others = [[j for j in range(k) if j != a] for a in range(k)]
    coefs = np.array([_multilinear_coeffs(table, base, mixing[a], [mixing[j] for j in others[a]]) for a in range(k)])
    # bits[T, i]: whether variable i appears in monomial T
    bits = (np.arange(1 << (k - 1))[:, None] >> np.arange(k - 1)) & 1 == 1
    # drop[i, T, j]: variable j's factor in the derivative of monomial T by variable i
    drop = bits[None, :, :] & ~np.eye(k - 1, dtype=bool)[:, None, :]

    def residual(x):
        Y = np.array([x[o] for o in others])  # (k, k-1)
        mono = np.prod(np.where(bits[None], Y[:, None, :], 1.0), axis=2)  # (k, 2^(k-1))
        F = np.sum(coefs * mono, axis=1)
        partial = np.prod(np.where(drop[None], Y[:, None, None, :], 1.0), axis=3)  # (k, k-1, 2^(k-1))
        grads = np.sum(np.where(bits.T[None], partial, 0.0) * coefs[:, None, :], axis=2)
        J = np.zeros((k, k))
        for a in range(k):
            J[a, others[a]] = grads[a]
        return F, J

    seeds = [np.full(k, 0.5)] + [np.array(c) for c in itertools.product((0.25, 0.75), repeat=k)]
    out = []
    for seed in seeds:
        sol = optimize.root(residual, seed, jac=True, method="hybr", tol=1e-14)
        if sol.success and np.all((sol.x > 0.0) & (sol.x < 1.0)):
            q = base.copy()
            q[mixing] = sol.x
            out.append(q)
    return _dedup(out)


def _support_candidates(table, N, mixing, pure_values):
    base = np.zeros(N)
    for n, val in pure_values.items():
        base[n] = val
    mixing = sorted(mixing)
    if len(mixing) == 1:
        return _one_mixer(table, base, mixing[0])
    if len(mixing) == 2:
        return _two_mixers(table, base, *mixing)
    if len(mixing) == 3:
        return _three_mixers(table, base, *mixing)
    return _many_mixers(table, base, mixing)


def _dedup(profiles):
    out = []
    for p in sorted(profiles, key=lambda q: tuple(q)):
        if all(np.max(np.abs(p - q)) > DEDUP_TOL for q in out):
            out.append(p)
    return out


def find_one_step_equilibrium(g: OneStepGame, eps: float = 0.0) -> list[np.ndarray]:
    """Profiles whose equilibrium gap is at most ``eps`` (plus 1e-10 rounding slack).

    All pure profiles are screened; mixed equilibria come from support
    enumeration, polished by Newton steps. Results are deduplicated and
    sorted lexicographically. An empty list means nothing was found.
    """
    N = g.num_players
    if N > MAX_EXHAUSTIVE_PLAYERS:
        raise TooManyPlayers(f"exhaustive search supports at most {MAX_EXHAUSTIVE_PLAYERS} players, got {N}")
    table = np.array(g.game.table)
    table[0] = g.v
    found = []
    for pure in itertools.product((0.0, 1.0), repeat=N):
        p = np.array(pure)
        if equilibrium_certificate(g, p).epsilon_star <= eps + FIND_TOL:
            found.append(p)

    for labels in itertools.product((0, 1, 2), repeat=N):
        mixing = [n for n, lab in enumerate(labels) if lab == 2]
        if not mixing:
            continue
        pure_values = {n: float(lab) for n, lab in enumerate(labels) if lab != 2}
        for q in _support_candidates(table, N, mixing, pure_values):
            if np.any(q[mixing] <= 0.0) or np.any(q[mixing] >= 1.0):
                continue
            q = _newton_polish(table, q, mixing)
            gains = np.array([_own_gain(table, q, n) for n in range(N)])
            if np.max(np.abs(gains[mixing])) > eps + FIND_TOL:
                continue
            if not _pure_conditions_hold(gains, q, mixing, eps + FIND_TOL):
                continue
            if equilibrium_certificate(g, q).epsilon_star <= eps + FIND_TOL:
                found.append(q)
    return _dedup(found)


def satisfies_assumption_two(g: OneStepGame, p) -> bool:
    """Either nobody quits, or some player who quits with positive probability gets at most 1."""
    p = np.asarray(p, dtype=float)
    if not p.any():
        return True
    gamma = one_step_payoff(g, p)
    return bool(np.any((p > 0.0) & (gamma <= 1.0 + CERT_SLACK)))


def select_player_m(g: OneStepGame, p) -> int:
    """Player whose quit probability gets raised.

    For ``p = 0`` this is a player with ``v[m] == 1``; otherwise a player with
    ``p[m] > 0`` whose payoff is at most 1. Smallest index wins.
    """
    p = check_profile(p, g.num_players)
    if not p.any():
        hits = np.flatnonzero(np.abs(g.v - 1.0) <= CERT_SLACK)
        if hits.size == 0:
            raise NoQualifyingPlayer(
                f"nobody quits but no player has continuation value 1 (v={g.v.tolist()}); "
                "such a profile cannot be an equilibrium with v in V"
            )
        return int(hits[0])
    gamma = one_step_payoff(g, p)
    hits = np.flatnonzero((p > 0.0) & (gamma <= 1.0 + CERT_SLACK))
    if hits.size == 0:
        raise NoQualifyingPlayer(f"every quitting player gets more than 1 (payoff {gamma.tolist()})")
    return int(hits[0])


def in_V(g: OneStepGame, w, slack: float = CERT_SLACK) -> tuple[bool, int | None]:
    """Whether ``w`` lies in ``[-2 r_max, 2 r_max]^N`` with some component at most 1.

    Returns ``(member, witness)``; ``witness`` is the first component <= 1.
    """
    w = np.asarray(w, dtype=float)
    bound = 2.0 * g.game.r_max
    boxed = bool(np.all(np.abs(w) <= bound + slack))
    low = np.flatnonzero(w <= 1.0 + slack)
    witness = int(low[0]) if low.size else None
    return boxed and witness is not None, witness


@dataclass(frozen=True)
class PsiMembershipCertificate:
    v: np.ndarray
    eps: float
    p_source: np.ndarray
    source_epsilon: float
    m: int
    p_hat: np.ndarray
    gamma_source: np.ndarray
    gamma_hat: np.ndarray
    in_V: bool
    in_V_witness: int | None
    perfect_epsilon: float
    perfect_bound: float
    perfect_ok: bool
    continue_prob: float
    continue_ok: bool

    @property
    def valid(self) -> bool:
        return self.in_V and self.perfect_ok and self.continue_ok


def _check_psi_inputs(g: OneStepGame, eps: float):
    if not 0.0 < eps < 1.0:
        raise BadEpsilon(f"eps must lie strictly between 0 and 1, got {eps}")
    solo = np.array([g.game.solo_payoff(n) for n in range(g.num_players)])
    bad = np.flatnonzero(np.abs(solo - 1.0) > 1e-12)
    if bad.size:
        raise AssumptionViolated(f"a player quitting alone must get 1; player {bad[0] + 1} gets {solo[bad[0]]!r}")
    member, _ = in_V(g, g.v)
    if not member:
        raise AssumptionViolated(f"v={g.v.tolist()} is not in V (box +-{2 * g.game.r_max!r}, some entry <= 1)")


def _pick_equilibrium(g: OneStepGame, candidates):
    for p in candidates:
        if not p.any():
            return p
    usable = [p for p in candidates if satisfies_assumption_two(g, p)]
    if not usable:
        raise AssumptionViolated("no equilibrium found has a quitting player with payoff at most 1")

    def score(p):
        gamma = one_step_payoff(g, p)
        return float(np.min(1.0 - gamma[p > 0.0]))

    # candidates are sorted, and max keeps the first of equal scores
    return max(usable, key=score)


def construct_psi_member(g: OneStepGame, eps: float) -> PsiMembershipCertificate:
    """Build ``p_hat`` with ``gamma_v(p_hat)`` in ``psi_eps(v)`` and certify it.

    Takes an equilibrium ``p`` of the one-step game, picks a player ``m``
    (``select_player_m``) and raises ``p[m]`` to ``(1 - eps) p[m] + eps``.
    The three membership conditions are filled in from the structure of
    the perturbation:

    - payoff: ``(1 - eps) gamma(p) + eps gamma(p with m quitting)``;
    - continue probability: ``(1 - eps)`` times that of ``p``;
    - quit gains: player ``m``'s is unchanged, others mix
      ``(1 - eps)`` of the old gain with ``eps`` of the gain when ``m`` quits.

    ``verify_psi_certificate`` re-checks them by direct evaluation.
    """
    eps = float(eps)
    _check_psi_inputs(g, eps)
    candidates = find_one_step_equilibrium(g, CERT_SLACK)
    if not candidates:
        raise NoEquilibriumFound("no one-step equilibrium found")
    p = _pick_equilibrium(g, candidates)
    m = select_player_m(g, p)
    p_hat = perturb(p, m, eps)

    p_m_quits = p.copy()
    p_m_quits[m] = 1.0
    gamma = one_step_payoff(g, p)
    gamma_hat = (1.0 - eps) * gamma + eps * one_step_payoff(g, p_m_quits)
    continue_prob = (1.0 - eps) * float(np.prod(1.0 - p))

    gains = quit_gains(g, p)
    gains_m_quits = quit_gains(g, p_m_quits)
    gains_hat = (1.0 - eps) * gains + eps * gains_m_quits
    gains_hat[m] = gains[m]
    perfect_eps = max(support_violation(d, Support.of(q)) for d, q in zip(gains_hat, p_hat))

    bound = 2.0 * eps * game_constants(g).r_max
    member, witness = in_V(g, gamma_hat)
    if member and gamma_hat[m] <= 1.0 + CERT_SLACK:
        witness = m
    return PsiMembershipCertificate(
        v=np.array(g.v),
        eps=eps,
        p_source=p,
        source_epsilon=equilibrium_certificate(g, p).epsilon_star,
        m=m,
        p_hat=p_hat,
        gamma_source=gamma,
        gamma_hat=gamma_hat,
        in_V=member,
        in_V_witness=witness,
        perfect_epsilon=float(perfect_eps),
        perfect_bound=bound,
        perfect_ok=bool(perfect_eps <= bound + CERT_SLACK),
        continue_prob=continue_prob,
        continue_ok=bool(continue_prob <= 1.0 - eps + CERT_SLACK),
    )


@dataclass(frozen=True)
class PsiVerification:
    gamma_hat: np.ndarray
    in_V: bool
    perfect_epsilon: float
    perfect_ok: bool
    continue_prob: float
    continue_ok: bool
    matches_certificate: bool

    @property
    def valid(self) -> bool:
        return self.in_V and self.perfect_ok and self.continue_ok and self.matches_certificate


def verify_psi_certificate(g: OneStepGame, cert: PsiMembershipCertificate, tol: float = 1e-10) -> PsiVerification:
    """Re-derive every certificate claim from ``p_hat`` alone, by direct evaluation."""
    p_hat = check_profile(cert.p_hat, g.num_players)
    N = g.num_players
    gamma = np.array(g.v) * rho(p_hat, 0)
    for S in range(1, 1 << N):
        gamma += rho(p_hat, S) * g.game.table[S]
    member, _ = in_V(g, gamma)
    perf = perfectness_report(g, p_hat)
    bound = 2.0 * cert.eps * g.game.r_max
    c = rho(p_hat, 0)
    matches = (
        np.max(np.abs(gamma - cert.gamma_hat)) <= tol
        and abs(perf.epsilon_star - cert.perfect_epsilon) <= tol
        and abs(c - cert.continue_prob) <= tol
    )
    return PsiVerification(
        gamma_hat=gamma,
        in_V=member,
        perfect_epsilon=perf.epsilon_star,
        perfect_ok=bool(perf.epsilon_star <= bound + CERT_SLACK),
        continue_prob=c,
        continue_ok=bool(c <= 1.0 - cert.eps + CERT_SLACK),
        matches_certificate=bool(matches),
    )
