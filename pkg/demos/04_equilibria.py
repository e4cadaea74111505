"""
Checking equilibria of larger economies
=======================================

An equilibrium is a spending matrix where no agent can raise its long-run
utility by changing its own column. The checker scores every column on a
fine lattice for each agent in turn.
"""
# %%
import numpy as np

from agent_economy import (
    ScenarioSpec,
    asymptotic_utilities,
    check_segregation_necessity,
    make_scenario,
    verify_collaboration,
    verify_equilibrium,
)


def show(title, report):
    print(f"{title}: equilibrium={report.is_equilibrium}")
    for v in report.per_agent:
        print(f"   agent {v.agent + 1}: now {v.current_utility:.4f}, best deviation "
              f"{v.deviation_utility:.4f} via {np.round(v.best_deviation_column, 3)}")


# %%
# Everyone splits spending between the other two: nobody can do better.
show("triangle", verify_equilibrium(make_scenario(ScenarioSpec("symmetric_triangle"))))

# %%
# Everyone buys from exactly one neighbour: each agent prefers to reroute.
show("rotation", verify_equilibrium(make_scenario(ScenarioSpec("rotation"))))

# %%
# An agent that serves itself best simply stays out of the market.
show("isolated", verify_equilibrium(make_scenario(ScenarioSpec("isolated_dominant"))))

# %%
# Agents 2 and 3 both sell to agent 1 and act together. Agent 1 is
# indifferent between all columns; the pair cannot improve their shared
# proportion.
collab = make_scenario(ScenarioSpec("collaboration", {"a": 1, "b": 3, "c": 3, "d": 1}))
report = verify_collaboration(collab)
show("collaboration", report)
c = report.coalitions[0]
print(f"   coalition proportion {c.current_proportion:.3f}, best found {c.best_proportion:.3f}")

# %%
# Two strong sellers and two weak ones: the groups trade only among
# themselves. Any leak across groups is punished.
segregated = make_scenario(ScenarioSpec("segregation_four"))
print("utilities:", asymptotic_utilities(segregated).per_agent)
show("segregation", verify_equilibrium(segregated))
P = segregated.spending.copy()
P[:, 2] *= 0.9
P[0, 2] += 0.1
leaky = segregated.with_spending(P)
print("groups separated after leak:", check_segregation_necessity(segregated, leaky))
show("after a 0.1 leak from agent 3", verify_equilibrium(leaky, agents=[2]))
