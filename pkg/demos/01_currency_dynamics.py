"""
Where does the money go?
========================

Three agents pass currency around. Each episode every agent spends its whole
holding according to its column of the spending matrix, so the currency
vector evolves as ``x <- P x``. This walk-through compares three ways of
finding where the currency settles.
"""
# %%
import numpy as np

from agent_economy import (
    Economy,
    cesaro_limit,
    is_irreducible,
    simulate,
    stationary_distribution,
    stationary_three_agent_closed_form,
)

P = np.array([
    [0.6, 0.3, 0.1],
    [0.3, 0.2, 0.5],
    [0.1, 0.5, 0.4],
])
economy = Economy(P, np.ones((3, 3)), initial_currency=[1.0, 0.0, 0.0])
print("irreducible:", is_irreducible(economy))

# %%
# A direct linear solve and the three-agent closed form agree to rounding.
direct = stationary_distribution(economy)
closed = stationary_three_agent_closed_form(economy)
print("linear solve :", direct)
print("closed form  :", closed)

# %%
# Simulation tracks the running time average of the currency. The first
# episodes are stepped one by one. After that the average is extended in
# doubling blocks, so very long horizons cost only a few dozen products.
trace = simulate(economy)
print(f"{trace.episodes} episodes, converged={trace.converged}, last change {trace.final_delta:.1e}")
print("time average :", trace.cesaro_average)
print(trace.to_csv().splitlines()[:4])

# %%
# A rotation never settles: all the money moves one agent along each
# episode. Its time average is still well defined.
rotation = Economy(np.roll(np.eye(3), 1, axis=0), np.ones((3, 3)), [1.0, 0.0, 0.0])
print("rotation average:", simulate(rotation).cesaro_average)

# %%
# When the support graph is not strongly connected there is no unique
# stationary vector. Money that leaves agent 1 never comes back, so the
# long-run average depends on where the currency started.
leaky = Economy(
    np.array([[0.5, 0.0, 0.0], [0.5, 0.0, 1.0], [0.0, 1.0, 0.0]]),
    np.ones((3, 3)),
    [0.6, 0.4, 0.0],
)
print("irreducible:", is_irreducible(leaky))
print("long-run average:", cesaro_limit(leaky))
