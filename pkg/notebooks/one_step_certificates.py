"""
One-step games: payoffs, perfectness and equilibrium gaps
==========================================================

A two-player quitting game collapsed to a single stage. If nobody quits the
players receive the continuation vector ``v``.
"""

import numpy as np

from quitgame import (
    OneStepGame,
    QuittingGame,
    convert_certificates,
    equilibrium_certificate,
    find_one_step_equilibrium,
    one_step_payoff,
    perfectness_report,
)

# payoffs when player 1 quits alone, player 2 quits alone, both quit
game = QuittingGame.from_payoffs({"1": [1, -1], "2": [1, 1], "1,2": [-2, -2]})
print("r_max =", game.r_max)

# %%
# Expected payoff: with v = (2, 2) and player 1 quitting one time in ten
g = OneStepGame(game, np.array([2.0, 2.0]))
print("gamma =", one_step_payoff(g, [0.1, 0.0]))

# %%
# Perfectness asks each player's support to be a near-best reply.
# (1, 0) is exact; (1, 0.1) puts weight on a bad action for player 2.
g = OneStepGame(game, np.array([0.0, 2.0]))
for p in ([1.0, 0.0], [1.0, 0.1]):
    perf = perfectness_report(g, p)
    eq = equilibrium_certificate(g, p)
    print(p, "diffs", perf.diffs, "perfect eps*", perf.epsilon_star, "equilibrium eps*", eq.epsilon_star)

# %%
# The two gaps are linked through xi_p; here the link is tight.
rep = convert_certificates(g, [1.0, 0.1])
print("xi_p =", rep.xi_p, " perfect eps* =", rep.perfectness_epsilon, " xi_p * eq eps* =",
      rep.xi_p * rep.equilibrium_epsilon)

# %%
# Every equilibrium of the v = (0, 0) game, pure and mixed
for p in find_one_step_equilibrium(OneStepGame(game, np.zeros(2))):
    print("equilibrium", p)
