"""
Certified members of psi_eps(v)
===============================

For a game where every player gets 1 when quitting alone, and a continuation
vector v in V, we build a profile that is 2 eps r_max-perfect, ends the stage
with probability at least eps, and whose payoff stays in V. The certificate is
then checked again by independent code.
"""

import numpy as np

from quitgame import (
    OneStepGame,
    QuittingGame,
    construct_psi_member,
    verify_psi_certificate,
)

game = QuittingGame.from_payoffs({"1": [1, -1], "2": [0, 1], "1,2": [-1, -0.5]})
g = OneStepGame(game, np.array([1.0, 2.0]))

cert = construct_psi_member(g, 0.1)
print("source equilibrium", cert.p_source, "player pushed", cert.m + 1)
print("p_hat", cert.p_hat, "gamma_hat", cert.gamma_hat)
print("in V:", cert.in_V, " perfect:", cert.perfect_epsilon, "<=", cert.perfect_bound,
      " continue:", cert.continue_prob)
print("independent check:", verify_psi_certificate(g, cert).valid)

# %%
# Random three-player games
rng = np.random.default_rng(0)
ok = 0
for _ in range(100):
    table = rng.uniform(-1, 1, size=(8, 3))
    table[0] = 0
    for n in range(3):
        table[1 << n, n] = 1.0
    v = rng.uniform(-2, 2, 3)
    v[rng.integers(3)] = min(v.min(), 1.0)
    g = OneStepGame(QuittingGame(3, table), v)
    cert = construct_psi_member(g, 0.05)
    ok += cert.valid and verify_psi_certificate(g, cert).valid
print(f"{ok}/100 certificates verified")
