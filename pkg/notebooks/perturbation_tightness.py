"""
Pushing one player toward quitting
==================================

Raising player m's quit probability from p to (1 - lam) p + lam moves the
payoff by at most lam (r_max + delta_v) and degrades perfectness by at most
2 lam r_max. Two small games show both bounds are attained.
"""

from pathlib import Path

import numpy as np

from quitgame import OneStepGame, load_game, theorem1_report

fixtures = Path(__file__).resolve().parent.parent / "fixtures"

# %%
# Payoff shift. Nobody quits at p = (0, 0), so the payoff is v = (1, 2).
tight_shift = OneStepGame(load_game(fixtures / "tight_shift.json"), np.array([1.0, 2.0]))
rep = theorem1_report(tight_shift, [0.0, 0.0], 0, 0.1, 0.0)
print("p_hat", rep.p_hat, "shift", rep.payoff_shift, "bound", rep.shift_bound)
print("the older bound 2 lam r_max would be", 2 * 0.1 * tight_shift.game.r_max)

# %%
# Perfectness. p = (0.1, 0) is 0.1-perfect; after lam = 0.2 it is 0.48-perfect
# and no better, matching (1 - lam) eta + 2 lam r_max.
tight_perfect = OneStepGame(load_game(fixtures / "tight_perfect.json"), np.array([9 / 10, 10 / 9]))
rep = theorem1_report(tight_perfect, [0.1, 0.0], 0, 0.2, 0.1)
print("p_hat", rep.p_hat, "eps*", rep.p_hat_epsilon, "eta_tilde", rep.eta_tilde)
print("checks:", rep.item1_holds, rep.item2_holds, rep.item3_holds, rep.item4_holds)

# %%
# Sweeping lam shows the perfectness gap tracks the bound exactly here.
for lam in np.linspace(0, 0.5, 6):
    rep = theorem1_report(tight_perfect, [0.1, 0.0], 0, lam, 0.1)
    print(f"lam={lam:.1f}  eps*={rep.p_hat_epsilon:.4f}  bound={rep.eta_tilde:.4f}")
