"""Nash-equilibrium checks for n-agent economies and generators for the canonical scenarios.

A spending matrix is an equilibrium when no agent can raise its long-run
utility per episode by changing its own column. Deviations are always scored
by the dynamics (Cesàro limit from the initial currency), never by the LP's
optimistic stationary vector.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Sequence

import numpy as np

from .best_response import (
    DEFAULT_GRID_POINTS,
    DEFAULT_RESOLUTION,
    best_response_brute_force,
    best_response_grid_lp,
)
from .dynamics import asymptotic_utilities, column_utilities, return_statistics
from .economy import Economy, EconomyError
from .two_agent import Scenario, TwoAgentGame, TwoAgentStrategy, classify_equilibria

DEFAULT_TOL = 1e-6
TIE_MARGIN = 1e-12
BRUTE_FORCE_MAX_AGENTS = 4


@dataclass(frozen=True)
class AgentVerdict:
    agent: int
    current_utility: float
    best_deviation_column: np.ndarray
    deviation_utility: float

    @property
    def gap(self) -> float:
        return self.deviation_utility - self.current_utility

    def to_dict(self) -> dict:
        return {
            "agent": self.agent,
            "current_utility": self.current_utility,
            "best_deviation_column": np.asarray(self.best_deviation_column).tolist(),
            "deviation_utility": self.deviation_utility,
            "gap": self.gap,
        }


@dataclass(frozen=True)
class CoalitionVerdict:
    """Joint deviation of a coalition restricted to one shared proportion."""

    agents: tuple[int, ...]
    current_utility: float
    current_proportion: float
    best_proportion: float
    deviation_utility: float

    @property
    def gap(self) -> float:
        return self.deviation_utility - self.current_utility

    def to_dict(self) -> dict:
        return {
            "agents": list(self.agents),
            "current_utility": self.current_utility,
            "current_proportion": self.current_proportion,
            "best_proportion": self.best_proportion,
            "deviation_utility": self.deviation_utility,
            "gap": self.gap,
        }


@dataclass(frozen=True)
class EquilibriumReport:
    per_agent: tuple[AgentVerdict, ...]
    tolerance: float
    coalitions: tuple[CoalitionVerdict, ...] = ()

    @property
    def is_equilibrium(self) -> bool:
        return all(v.gap <= self.tolerance for v in (*self.per_agent, *self.coalitions))

    def __bool__(self):
        return self.is_equilibrium

    def to_dict(self) -> dict:
        out = {
            "is_equilibrium": self.is_equilibrium,
            "tolerance": self.tolerance,
            "per_agent": [v.to_dict() for v in self.per_agent],
        }
        if self.coalitions:
            out["coalitions"] = [c.to_dict() for c in self.coalitions]
        return out


def best_deviation(
    economy: Economy, agent: int, resolution: int = DEFAULT_RESOLUTION,
    grid_points: int = DEFAULT_GRID_POINTS,
) -> tuple[np.ndarray, float]:
    """Most profitable column for ``agent`` and its dynamics-scored utility.

    Up to four agents the whole simplex lattice is scored. Beyond that the
    grid-LP column is rescored together with every pure column.
    """
    if economy.n <= BRUTE_FORCE_MAX_AGENTS:
        br = best_response_brute_force(economy, agent, resolution)
        return br.column, br.utility
    lp_column = best_response_grid_lp(economy, agent, grid_points).column
    candidates = np.vstack([lp_column, np.eye(economy.n)])
    scores = column_utilities(economy, agent, candidates, return_statistics(economy, agent))
    k = int(np.argmax(scores))
    return candidates[k], float(scores[k])


def verify_equilibrium(
    economy: Economy, resolution: int = DEFAULT_RESOLUTION, tol: float = DEFAULT_TOL,
    agents: Sequence[int] | None = None,
) -> EquilibriumReport:
    """Search every agent's unilateral deviations and report the best one."""
    if resolution < 10:
        raise ValueError("resolution must be >= 10")
    if tol <= 0:
        raise ValueError("tol must be positive")
    economy.require_valid()
    current = asymptotic_utilities(economy).per_agent
    verdicts = []
    for j in range(economy.n) if agents is None else agents:
        column, value = best_deviation(economy, j, resolution)
        verdicts.append(AgentVerdict(j, float(current[j]), column, value))
    return EquilibriumReport(tuple(verdicts), tol)


# -- scenarios ---------------------------------------------------------------------

class ScenarioError(EconomyError, ValueError):
    """Scenario parameters violate the hypotheses of the configuration."""


class ScenarioName(str, Enum):
    AUTARKY = "autarky"
    ISOLATED_DOMINANT = "isolated_dominant"
    SYMMETRIC_TRIANGLE = "symmetric_triangle"
    ROTATION = "rotation"
    COLLABORATION = "collaboration"
    SEGREGATION_FOUR = "segregation_four"


@dataclass(frozen=True)
class ScenarioSpec:
    name: ScenarioName
    parameters: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "name", ScenarioName(self.name))

    @property
    def generated(self) -> Economy:
        return make_scenario(self)


def _unit_cross_utility(n: int = 3) -> np.ndarray:
    return np.ones((n, n)) - np.eye(n)


def _two_agent_block(game: TwoAgentGame, choice: str | None) -> TwoAgentStrategy:
    """Pick an equilibrium point of a two-agent sub-game."""
    points = {e.scenario: e.strategy for e in classify_equilibria(game) if e.is_point}
    if choice is None:
        choice = Scenario.BILATERAL_PARTIAL if Scenario.BILATERAL_PARTIAL in points else Scenario.NO_ADOPTION
    choice = Scenario(choice)
    if choice not in points:
        raise ScenarioError(f"{choice.value} is not an equilibrium of {game}")
    return points[choice]


def make_scenario(spec: ScenarioSpec) -> Economy:
    """Build the economy of a named configuration.

    Parameters by scenario:

    ``autarky``
        ``n`` (default 3), ``utility`` (default all ones).
    ``isolated_dominant``
        ``utility`` 3x3 where agent 1 serves itself strictly better than anyone
        else serves it; optional ``sub_equilibrium`` for agents 2 and 3.
    ``symmetric_triangle``, ``rotation``
        none.
    ``collaboration``
        ``a, b, c, d`` with ``b > 2a`` and ``c > 2d``.
    ``segregation_four``
        ``utility`` 4x4 where agents 1 and 2 are better sellers than agents 3
        and 4 for every buyer; optional ``blocks`` naming the two-agent
        equilibrium each group plays.
    """
    params = dict(spec.parameters)
    x0 = params.pop("initial_currency", None)
    name = spec.name

    if name is ScenarioName.AUTARKY:
        n = int(params.get("n", 3))
        U = np.asarray(params.get("utility", np.ones((n, n))), dtype=float)
        return Economy(np.eye(U.shape[0]), U, x0)

    if name is ScenarioName.ISOLATED_DOMINANT:
        U = np.asarray(params.get("utility", [[3, 1, 1], [1, 1, 3], [1, 3, 1]]), dtype=float)
        if U.shape != (3, 3):
            raise ScenarioError("isolated_dominant needs a 3x3 utility matrix")
        if not np.all(U[0, 0] > U[1:, 0]):
            raise ScenarioError("agent 1 must provide itself strictly more utility than any other agent does")
        game = TwoAgentGame(a=U[1, 1], b=U[2, 1], c=U[1, 2], d=U[2, 2])
        s = _two_agent_block(game, params.get("sub_equilibrium"))
        P = np.zeros((3, 3))
        P[0, 0] = 1.0
        P[1:, 1:] = s.spending_matrix()
        return Economy(P, U, x0)

    if name is ScenarioName.SYMMETRIC_TRIANGLE:
        return Economy(0.5 * _unit_cross_utility(), _unit_cross_utility(), x0)

    if name is ScenarioName.ROTATION:
        # agent 1 buys from 2, 2 from 3, 3 from 1
        P = np.roll(np.eye(3), 1, axis=0)
        return Economy(P, _unit_cross_utility(), x0)

    if name is ScenarioName.COLLABORATION:
        try:
            a, b, c, d = (float(params[k]) for k in "abcd")
        except KeyError as exc:
            raise ScenarioError(f"collaboration needs parameters a, b, c, d; missing {exc}") from None
        if not (b > 2 * a and c > 2 * d):
            raise ScenarioError("collaboration needs b > 2a and c > 2d")
        each = d / (2 * (c - d))
        back = a / (b - a)
        P = np.array([
            [1 - 2 * each, back, back],
            [each, 1 - back, 0.0],
            [each, 0.0, 1 - back],
        ])
        U = np.array([[a, c, c], [b, d, 0.0], [b, 0.0, d]])
        return Economy(P, U, x0)

    if name is ScenarioName.SEGREGATION_FOUR:
        U = np.asarray(params.get("utility", [
            [2, 6, 5, 5], [6, 2, 5, 5], [1, 1, 0.5, 1.5], [1, 1, 1.5, 0.5]]), dtype=float)
        if U.shape != (4, 4):
            raise ScenarioError("segregation_four needs a 4x4 utility matrix")
        if not powerful_dominates(U, (0, 1)):
            raise ScenarioError("agents 1 and 2 must be strictly better sellers than agents 3 and 4 for every buyer")
        blocks = params.get("blocks", (None, None))
        P = np.zeros((4, 4))
        for (i, k), choice in zip(((0, 1), (2, 3)), blocks):
            game = TwoAgentGame(a=U[i, i], b=U[k, i], c=U[i, k], d=U[k, k])
            P[np.ix_((i, k), (i, k))] = _two_agent_block(game, choice).spending_matrix()
        return Economy(P, U, x0)

    raise ScenarioError(f"unknown scenario {name}")  # pragma: no cover


# -- collaboration --------------------------------------------------------------

def _coalition_economy(economy: Economy, proportion: float) -> Economy:
    P = economy.spending.copy()
    P[:, 1] = (proportion, 1 - proportion, 0.0)
    P[:, 2] = (proportion, 0.0, 1 - proportion)
    return economy.with_spending(P)


def verify_collaboration(
    economy: Economy, tol: float = DEFAULT_TOL, resolution: int = DEFAULT_RESOLUTION,
    proportion_points: int = 1001,
) -> EquilibriumReport:
    """Check the three-agent collaboration configuration.

    Agent 1 faces every unilateral deviation. Agents 2 and 3 act as one
    coalition maximizing their combined utility, restricted to buying the same
    proportion from agent 1 and never from each other; that proportion is
    scanned on a uniform grid.
    """
    P = economy.spending
    if economy.n != 3:
        raise ScenarioError("the collaboration check needs three agents")
    if P[2, 1] != 0 or P[1, 2] != 0 or P[0, 1] != P[0, 2]:
        raise ScenarioError("agents 2 and 3 must not trade with each other and must buy equally from agent 1")
    report = verify_equilibrium(economy, resolution, tol, agents=[0])
    current = asymptotic_utilities(economy).per_agent
    combined = float(current[1] + current[2])
    best_s, best_v = float(P[0, 1]), combined
    for s in np.linspace(0.0, 1.0, proportion_points):
        v = asymptotic_utilities(_coalition_economy(economy, s)).per_agent
        if v[1] + v[2] > best_v + TIE_MARGIN * max(1.0, abs(best_v)):
            best_s, best_v = float(s), float(v[1] + v[2])
    coalition = CoalitionVerdict((1, 2), combined, float(P[0, 1]), best_s, best_v)
    return EquilibriumReport(report.per_agent, tol, (coalition,))


# -- segregation ----------------------------------------------------------------

def powerful_dominates(utility, powerful: Sequence[int]) -> bool:
    """Every powerful seller beats every other seller, for every buyer."""
    U = np.asarray(utility)
    mask = np.zeros(U.shape[0], dtype=bool)
    mask[list(powerful)] = True
    if mask.all() or not mask.any():
        return False
    return bool(np.all(U[mask].min(axis=0) > U[~mask].max(axis=0)))


def powerful_group(utility, size: int | None = None) -> tuple[int, ...]:
    """Find the set of sellers that strictly dominates the rest in every column."""
    U = np.asarray(utility)
    n = U.shape[0]
    size = n // 2 if size is None else size
    top = tuple(sorted(np.argsort(-U[:, 0], kind="stable")[:size].tolist()))
    if not powerful_dominates(U, top):
        raise ScenarioError(f"no group of {size} sellers dominates the others for every buyer")
    return top


def check_segregation_necessity(
    economy: Economy, candidate: Economy, tol: float = 0.0, powerful: Sequence[int] | None = None,
) -> bool:
    """True iff ``candidate`` has no spending between the powerful and the other group.

    Groups are read off ``economy``'s utility matrix unless given explicitly.
    """
    group = tuple(powerful) if powerful is not None else powerful_group(economy.utility)
    mask = np.zeros(economy.n, dtype=bool)
    mask[list(group)] = True
    cross = np.asarray(candidate.spending)[np.ix_(mask, ~mask)], np.asarray(candidate.spending)[np.ix_(~mask, mask)]
    return bool(all(np.all(block <= tol) for block in cross))
