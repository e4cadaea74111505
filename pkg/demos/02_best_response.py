"""
The best seller is not always the best trading partner
======================================================

Agent 1 gets 9.8 units of utility per dollar spent at agent 2, and only 1
unit at agent 3. Agent 2 almost never buys anything back, while agent 3
sends half of its currency to agent 1. We ask which spending column is best
for agent 1 when everyone else keeps their habits.
"""
# %%
import numpy as np

from agent_economy import best_response_brute_force, best_response_grid_lp, rescore_by_dynamics
from agent_economy.cli import returning_seller_economy

economy = returning_seller_economy()
print("spending:\n", economy.spending)
print("utility:\n", economy.utility)

# %%
# Grid search over agent 1's long-run share, one linear program per grid value.
lp = best_response_grid_lp(economy, agent=0, grid_points=1001)
print("grid LP column   :", lp.column, f"utility {lp.utility:.6f}")

# %%
# Independent check: score every column on a 1/200 lattice with the dynamics.
bf = best_response_brute_force(economy, agent=0, resolution=200)
print("brute-force column:", bf.column, f"utility {bf.utility:.6f}")

# %%
# Compare the two pure strategies directly.
for name, column in [("all to agent 2", [0, 1, 0]), ("all to agent 3", [0, 0, 1])]:
    print(f"{name}: {rescore_by_dynamics(economy, 0, column):.6f}")

# %%
# Agent 2's generous utility is worth little because the money agent 1 pays
# it rarely returns. Sweep the mix between the two sellers to see it.
for share in np.linspace(0, 1, 6):
    value = rescore_by_dynamics(economy, 0, [0, share, 1 - share])
    print(f"share to agent 2 = {share:.1f}: utility {value:.6f}")
