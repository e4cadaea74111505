"""Best responses of one agent with every other column held fixed.

Three routes are provided and cross-checked in the tests:

* :func:`best_response_grid_lp` searches the agent's stationary share on a
  uniform grid and solves a linear program at each grid value;
* :func:`best_response_brute_force` scores every column of a simplex lattice
  with the long-run dynamics;
* :func:`rescore_by_dynamics` scores any single column with the dynamics.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np

from .dynamics import asymptotic_utilities, column_utilities, return_statistics
from .economy import CurrencyDistribution, Economy, EconomyError
from .lp import LinearProgram, solve_lp

DEFAULT_GRID_POINTS = 1001
DEFAULT_RESOLUTION = 200
TIE_TOL = 1e-9


class Method(str, Enum):
    GRID_LP = "grid_lp"
    BRUTE_FORCE = "brute_force"
    DYNAMICS_RESCORED = "dynamics_rescored"


@dataclass(frozen=True)
class BestResponseResult:
    """An optimizing column for ``agent`` and the utility it achieves.

    For ``grid_lp`` the utility is the LP objective at the winning grid value.
    The LP may pick any stationary vector of the assembled matrix, so the
    value can be optimistic on reducible matrices (``optimistic=True``). The
    other methods score by the dynamics.
    """

    agent: int
    column: np.ndarray
    stationary: CurrencyDistribution
    utility: float
    method: Method
    optimistic: bool = False

    def to_dict(self) -> dict:
        return {
            "agent": self.agent,
            "column": self.column.tolist(),
            "stationary": self.stationary.tolist(),
            "utility": self.utility,
            "method": self.method.value,
            "optimistic": self.optimistic,
        }


def _pick(utilities: np.ndarray, columns: np.ndarray, agent: int) -> int:
    """Index of the best column; ties prefer more self-spend, then the
    lexicographically larger column."""
    best = utilities.max()
    tied = np.flatnonzero(utilities >= best - TIE_TOL * max(1.0, abs(best)))
    if tied.size == 1:
        return int(tied[0])
    keys = np.round(columns[tied], 9)
    # lexsort sorts by the last key first
    order = np.lexsort(tuple(keys[:, ::-1].T) + (keys[:, agent],))
    return int(tied[order[-1]])


# -- grid search over the stationary share ------------------------------------

def _share_lp(economy: Economy, agent: int, share: float) -> LinearProgram:
    """LP in ``(x_k for k != agent, column)`` with ``x_agent = share`` fixed."""
    P, n = economy.spending, economy.n
    others = [k for k in range(n) if k != agent]
    nx = n - 1
    A = np.zeros((n + 2, nx + n))
    b = np.zeros(n + 2)
    # balance rows: sum_k P_ik x_k + share * c_i = x_i
    A[:n, :nx] = P[:, others]
    for col, k in enumerate(others):
        A[k, col] -= 1.0
    A[:n, nx:] = share * np.eye(n)
    b[agent] = share
    A[n, :nx] = 1.0
    b[n] = 1.0 - share
    A[n + 1, nx:] = 1.0
    b[n + 1] = 1.0
    objective = np.zeros(nx + n)
    objective[nx:] = share * economy.utility[:, agent]
    return LinearProgram(objective, A_eq=A, b_eq=b)


def _assemble(agent: int, share: float, x_others: np.ndarray) -> np.ndarray:
    return np.insert(x_others, agent, share)


def best_response_grid_lp(
    economy: Economy, agent: int, grid_points: int = DEFAULT_GRID_POINTS
) -> BestResponseResult:
    """Grid search over the agent's stationary share with an LP per grid value.

    With ``x_agent`` fixed, maximizing ``x_agent * sum_i c_i U_i,agent`` over
    the agent's column ``c`` and the remaining stationary masses is linear.
    The grid is uniform and endpoint-inclusive on [0, 1]. Ties keep the
    column with the largest self-spend.

    The winning column is finally rounded to multiples of the grid spacing.
    The rounded column is kept when the dynamics score it no lower than the
    raw LP column; its stationary vector then comes from the dynamics. The
    reported utility is always the LP objective.
    """
    economy.require_valid()
    if grid_points < 2:
        raise ValueError("grid_points must be >= 2")
    n = economy.n
    nx = n - 1
    best_value = -np.inf
    results = []
    for share in np.linspace(0.0, 1.0, grid_points):
        lp = _share_lp(economy, agent, share)
        res = solve_lp(lp)
        if not res.optimal:
            continue
        results.append((share, lp, res))
        best_value = max(best_value, res.objective)
    if not results:
        raise EconomyError("every grid LP is infeasible; self-spending at share 1 should always be feasible")

    cutoff = best_value - TIE_TOL * max(1.0, abs(best_value))
    candidates = []
    for share, lp, res in results:
        if res.objective < cutoff:
            continue
        # among optimal points of this LP, maximize self-spend; the floor is
        # this LP's own optimum so the tie step cannot trade utility for it
        floor = np.zeros(lp.num_vars)
        floor[nx:] = -lp.objective[nx:]
        own = res.objective - 1e-12 * max(1.0, abs(res.objective))
        tie_lp = LinearProgram(
            np.eye(lp.num_vars)[nx + agent],
            A_eq=lp.A_eq, b_eq=lp.b_eq,
            A_ub=floor[None, :], b_ub=np.array([-own]),
        )
        tie = solve_lp(tie_lp)
        x = tie.x if tie.optimal else res.x
        candidates.append((share, x, float(lp.objective @ x)))

    columns = np.array([x[nx:] for _, x, _ in candidates])
    values = np.array([v for _, _, v in candidates])
    k = _pick(values, columns, agent)
    share, x, value = candidates[k]
    column = _clean_column(x[nx:])
    stationary = CurrencyDistribution(_normalized(_assemble(agent, share, np.maximum(x[:nx], 0.0))))
    snapped = _snap(column, grid_points - 1)
    if not np.array_equal(snapped, column):
        raw_score = rescore_by_dynamics(economy, agent, column)
        profile = asymptotic_utilities(economy.with_column(agent, snapped))
        if profile.per_agent[agent] >= raw_score - TIE_TOL * max(1.0, abs(raw_score)):
            column, stationary = snapped, profile.currency
    return BestResponseResult(agent, column, stationary, max(value, 0.0), Method.GRID_LP, optimistic=True)


def _normalized(x: np.ndarray) -> np.ndarray:
    return x / x.sum()


def _snap(column: np.ndarray, steps: int) -> np.ndarray:
    """Round a column to multiples of ``1/steps`` keeping the sum at 1 (largest remainder)."""
    scaled = column * steps
    counts = np.floor(scaled + 1e-9)
    short = int(round(steps - counts.sum()))
    if short > 0:
        counts[np.argsort(-(scaled - counts), kind="stable")[:short]] += 1
    return counts / steps


def _clean_column(column: np.ndarray) -> np.ndarray:
    column = np.where(np.abs(column) < 1e-10, 0.0, np.maximum(column, 0.0))
    return column / column.sum()


# -- lattice enumeration ------------------------------------------------------

@lru_cache(maxsize=16)
def _lattice(n: int, resolution: int) -> np.ndarray:
    # stars and bars: bar positions among resolution + n - 1 slots
    bars = np.array(list(itertools.combinations(range(resolution + n - 1), n - 1)), dtype=np.int64)
    if n == 1:
        counts = np.full((1, 1), resolution)
    else:
        edges = np.concatenate(
            [np.full((len(bars), 1), -1), bars, np.full((len(bars), 1), resolution + n - 1)], axis=1
        )
        counts = np.diff(edges, axis=1) - 1
    out = counts / resolution
    out.setflags(write=False)
    return out


def simplex_lattice(n: int, resolution: int) -> np.ndarray:
    """All length-``n`` probability vectors with entries in multiples of ``1/resolution``."""
    if resolution < 1:
        raise ValueError("resolution must be >= 1")
    return _lattice(n, resolution)


def best_response_brute_force(
    economy: Economy, agent: int, resolution: int = DEFAULT_RESOLUTION
) -> BestResponseResult:
    """Score every lattice column with the long-run dynamics and keep the best.

    Practical for ``n <= 4`` at the default resolution (about 1.4 million
    columns for four agents).
    """
    economy.require_valid()
    columns = simplex_lattice(economy.n, resolution)
    utilities = column_utilities(economy, agent, columns, return_statistics(economy, agent))
    k = _pick(utilities, columns, agent)
    column = np.array(columns[k])
    profile = asymptotic_utilities(economy.with_column(agent, column))
    return BestResponseResult(agent, column, profile.currency, float(utilities[k]), Method.BRUTE_FORCE)


def rescore_by_dynamics(economy: Economy, agent: int, column) -> float:
    """Long-run utility of ``agent`` after switching to ``column``."""
    return float(asymptotic_utilities(economy.with_column(agent, column)).per_agent[agent])


def rescored(result: BestResponseResult, economy: Economy) -> BestResponseResult:
    """Replace a result's utility and stationary vector with the dynamics' verdict."""
    profile = asymptotic_utilities(economy.with_column(result.agent, result.column))
    return BestResponseResult(
        result.agent, result.column, profile.currency,
        float(profile.per_agent[result.agent]), Method.DYNAMICS_RESCORED,
    )
