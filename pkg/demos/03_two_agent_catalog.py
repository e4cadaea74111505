"""
Every equilibrium of a two-agent economy
========================================

Agent A values its own goods at ``a`` and B's at ``b``; agent B values A's
goods at ``c`` and its own at ``d``. A spends a fraction ``p`` at B and B
spends ``q`` at A. Trade only pays when the other side's goods are worth
at least twice your own.
"""
# %%
import numpy as np

from agent_economy import TwoAgentGame, TwoAgentStrategy, classify_equilibria, verify_two_agent_point
from agent_economy.two_agent import episode_values, equilibrium_mask

for game in [TwoAgentGame(1, 3, 3, 1), TwoAgentGame(1, 1.5, 3, 1), TwoAgentGame(1, 3, 2, 1)]:
    print(f"a={game.a} b={game.b} c={game.c} d={game.d}")
    for entry in classify_equilibria(game):
        print("   ", entry.scenario.value, "p:", entry.p_range, "q:", entry.q_range,
              "(upper end open)" if entry.upper_open else "")

# %%
# Long-run value per episode at the interior point of (1, 3, 3, 1).
game = TwoAgentGame(1, 3, 3, 1)
print("values at (1/2, 1/2):", episode_values(game, TwoAgentStrategy(0.5, 0.5)))
print("verified:", verify_two_agent_point(game, TwoAgentStrategy(0.5, 0.5)))

# %%
# Scan a coarse lattice and draw the points where neither agent can gain.
P, Q, passed = equilibrium_mask(game, points=21)
for row in range(20, -1, -1):
    print(f"q={Q[0, row]:.2f} " + "".join("#" if passed[col, row] else "." for col in range(21)))
print("       p from 0 to 1")
