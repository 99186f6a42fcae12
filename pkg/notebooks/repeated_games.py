"""
The full game: payoffs, best replies and simulation
===================================================

Profiles are eventually cyclic: a finite prefix, then a repeating cycle.
"""

import numpy as np

from quitgame import (
    EventuallyCyclicProfile,
    QuittingGame,
    best_response,
    equilibrium_certificate_repeated,
    repeated_payoff,
    simulate,
    subgame_certificate,
    truncated_payoff,
)

game = QuittingGame.from_payoffs({"1": [1, -1], "2": [1, 1], "1,2": [-2, -2]})

# %%
# Player 1 quits with probability 1/2 every stage. The game ends surely and
# only player 1 ever quits, so the payoff is r_{1}.
pi = EventuallyCyclicProfile.stationary([0.5, 0.0])
print(repeated_payoff(game, pi))
for K in (1, 10, 50):
    t = truncated_payoff(game, pi, K)
    print(f"K={K:<3} partial sum {t.payoff}  tail bound {t.tail_bound:.2e}")

# %%
# Player 2 does better by quitting too: half the time it collides with
# player 1 and gets -2, otherwise it gets 1.
dev = best_response(game, pi, 1)
print("player 2 best value", dev.best_value, "policy", dev.best_policy)
print("equilibrium gap", equilibrium_certificate_repeated(game, pi).epsilon_star)

# %%
# A cyclic profile and the worst gap over its subgames
pi = EventuallyCyclicProfile([[1, 0]], [[0, 0.3], [0.2, 0]])
sub = subgame_certificate(game, pi)
print("per-shift gaps", np.round(sub.per_shift, 4), "worst shift", sub.worst_shift)

# %%
# Simulation agrees with the closed form
pi = EventuallyCyclicProfile([[0.2, 0.1]], [[0.05, 0.3], [0.1, 0.0]])
s = simulate(game, pi, trials=200_000, seed=1)
print("simulated", s.mean_payoff, "+-", s.stderr)
print("exact    ", repeated_payoff(game, pi).payoff)
