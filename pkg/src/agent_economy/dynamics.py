"""Currency dynamics: stationary distributions, Cesàro limits and per-episode utilities."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .economy import (
    CurrencyDistribution,
    DimensionError,
    Economy,
    EconomyError,
    is_irreducible,
    strong_components,
    support_graph,
)

DEFAULT_EPISODES = 2**40
DEFAULT_CONVERGENCE_TOL = 1e-10
STEPPED_EPISODES = 1024
CLOSED_FORM_MIN_DET = 1e-12


class ReducibleChainError(EconomyError):
    """The spending matrix has no unique stationary distribution."""


class SingularSystemError(EconomyError, ArithmeticError):
    pass


def _distribution(x: np.ndarray) -> CurrencyDistribution:
    x = np.where(np.abs(x) < 1e-15, 0.0, x)
    return CurrencyDistribution(x / x.sum())


def _stationary_block(P: np.ndarray) -> np.ndarray:
    """Stationary vector of an irreducible block via its jump chain.

    A dollar at ``k`` leaves at rate ``exit_k = sum_{i != k} P_ik``; the
    jump chain ``J = offdiag(P) / exit`` has stationary ``mu`` and then
    ``x_k`` is proportional to ``mu_k / exit_k``. Working with the exit rates
    avoids computing ``1 - P_kk``, which cancels to 0 for tiny outflows.
    """
    n = P.shape[0]
    if n == 1:
        return np.ones(1)
    off = P - np.diag(np.diag(P))
    exit_rate = off.sum(axis=0)
    J = off / exit_rate
    # (I - J) mu = 0 with the last balance equation replaced by sum(mu) = 1
    A = np.eye(n) - J
    A[-1, :] = 1.0
    b = np.zeros(n)
    b[-1] = 1.0
    mu = np.linalg.solve(A, b)
    x = mu * (exit_rate.min() / exit_rate)
    return x / x.sum()


def stationary_distribution(economy: Economy) -> CurrencyDistribution:
    """Unique ``x`` with ``P x = x`` and ``sum(x) = 1`` for an irreducible economy.

    Raises
    ------
    ReducibleChainError
        When the support graph is not strongly connected. Use
        :func:`cesaro_limit` for the long-run average from the initial currency.
    """
    if not is_irreducible(economy):
        raise ReducibleChainError(
            "no unique stationary distribution: spending matrix is reducible; use cesaro_limit"
        )
    return _distribution(_stationary_block(economy.spending))


def three_agent_determinant(spending) -> float:
    P = np.asarray(spending)
    p = lambda i, j: P[i - 1, j - 1]  # noqa: E731  (1-based, as in the closed form)
    return (p(1, 2) + p(3, 2) + p(2, 3)) * (p(2, 1) + p(3, 1) + p(1, 3)) - (
        p(1, 2) - p(1, 3)
    ) * (p(2, 1) - p(2, 3))


def stationary_three_agent_closed_form(economy: Economy) -> CurrencyDistribution:
    """Closed-form stationary vector of a three-agent economy.

    Eliminates ``x3 = 1 - x1 - x2`` from the balance equations and solves the
    remaining 2x2 system by Cramer's rule.
    """
    if economy.n != 3:
        raise DimensionError(f"closed form needs exactly 3 agents, got {economy.n}")
    P = economy.spending
    p = lambda i, j: P[i - 1, j - 1]  # noqa: E731
    delta = three_agent_determinant(P)
    if abs(delta) < CLOSED_FORM_MIN_DET:
        raise SingularSystemError(f"determinant {delta:.3g} is numerically zero")
    x1 = (p(1, 3) * (p(1, 2) + p(3, 2) + p(2, 3)) + p(2, 3) * (p(1, 2) - p(1, 3))) / delta
    x2 = (p(2, 3) * (p(2, 1) + p(3, 1) + p(1, 3)) + p(1, 3) * (p(2, 1) - p(2, 3))) / delta
    return CurrencyDistribution(np.array([x1, x2, 1.0 - x1 - x2]))


def cesaro_limit(economy: Economy) -> CurrencyDistribution:
    """Long-run time average of the currency started from ``initial_currency``.

    Equals the stationary distribution for irreducible economies. Otherwise
    transient agents end with zero mass and each closed class keeps its own
    initial currency plus everything absorbed into it from transient agents,
    spread according to the class's stationary distribution.
    """
    P = economy.spending
    n = economy.n
    x0 = economy.initial_currency
    labels = strong_components(P)
    adj = support_graph(P)
    closed = [c for c in np.unique(labels) if not adj[labels == c][:, labels != c].any()]
    if len(closed) == 1 and np.all(labels == closed[0]):
        return _distribution(_stationary_block(P))

    transient = np.isin(labels, closed, invert=True)
    T = np.flatnonzero(transient)
    if T.size:
        # jump chain of the transient agents: where a dollar goes when it
        # leaves an agent. Exit rates are summed from the off-diagonal
        # entries so that a self-spend of 1 - 1e-300 does not cancel to 0.
        off = P[:, T].copy()
        off[T, np.arange(T.size)] = 0.0
        jump = off / off.sum(axis=0)
        # expected visits to each transient agent, in departures
        visits = np.linalg.solve(np.eye(T.size) - jump[T], x0[T])
    out = np.zeros(n)
    for c in closed:
        C = np.flatnonzero(labels == c)
        mass = x0[C].sum()
        if T.size:
            mass += jump[C].sum(axis=0) @ visits
        out[C] = mass * _stationary_block(P[np.ix_(C, C)])
    return _distribution(out)


def long_run_currency(economy: Economy) -> CurrencyDistribution:
    """Stationary distribution when unique, Cesàro limit otherwise."""
    return cesaro_limit(economy)


def per_dollar_utilities(economy: Economy) -> np.ndarray:
    """Utility each agent gets per dollar it holds: ``sum_i P_ij U_ij``."""
    return np.einsum("ij,ij->j", economy.spending, economy.utility)


@dataclass(frozen=True)
class UtilityProfile:
    per_agent: np.ndarray
    currency: CurrencyDistribution

    def __getitem__(self, j):
        return self.per_agent[j]

    def __len__(self):
        return len(self.per_agent)


def asymptotic_utilities(economy: Economy) -> UtilityProfile:
    """Asymptotic utility per episode of every agent.

    ``per_agent[j] = xbar_j * sum_i P_ij U_ij`` with ``xbar`` the unique
    stationary distribution when it exists and the Cesàro limit from the
    initial currency otherwise.
    """
    x = cesaro_limit(economy)
    return UtilityProfile(x.values * per_dollar_utilities(economy), x)


# -- simulation ----------------------------------------------------------------

@dataclass(frozen=True)
class SimulationTrace:
    """Result of :func:`simulate`.

    ``trajectory`` holds ``(episode, currency)`` pairs: every ``thin``-th
    episode of the stepped prefix and then every block-doubling checkpoint.
    """

    episodes: int
    trajectory: list = field(repr=False)
    cesaro_average: CurrencyDistribution
    converged: bool
    final_delta: float

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        n = len(self.cesaro_average)
        writer.writerow(["episode"] + [f"x_{k + 1}" for k in range(n)])
        for t, x in self.trajectory:
            writer.writerow([t] + [format(v, ".17g") for v in x])
        return buf.getvalue()


def simulate(
    economy: Economy,
    episodes: int = DEFAULT_EPISODES,
    convergence_tol: float = DEFAULT_CONVERGENCE_TOL,
    thin: int = 1,
) -> SimulationTrace:
    """Iterate ``x <- P x`` from the initial currency and track the Cesàro average.

    The first ``min(episodes, 1024)`` episodes are stepped one at a time and
    recorded. After that the running sum ``s_T = sum_{t<T} x^t`` is extended
    in doubling blocks, ``s_2T = s_T + P^T s_T``, so the average over ``T``
    episodes costs ``O(log T)`` matrix products. Convergence is declared when
    the averages at ``T`` and ``2T`` differ by less than ``convergence_tol``
    in L1; the reported average then covers ``2T`` episodes. ``episodes`` is
    a budget: the largest power of two not exceeding it bounds the run.
    """
    if episodes < 1:
        raise ValueError("episodes must be >= 1")
    P = np.asarray(economy.spending)
    x = economy.initial_currency.copy()
    trajectory = []
    total = np.zeros_like(x)
    prev_avg = None
    delta = np.inf
    converged = False

    stepped = min(episodes, STEPPED_EPISODES)
    for t in range(stepped):
        if t % thin == 0:
            trajectory.append((t, x.copy()))
        total += x
        # doubling checkpoints inside the stepped prefix
        if (t + 1) & t == 0:
            avg = total / (t + 1)
            if prev_avg is not None:
                delta = float(np.abs(avg - prev_avg).sum())
                if delta < convergence_tol:
                    return _trace(t + 1, trajectory, avg, True, delta)
            prev_avg = avg
        x = P @ x
    T = stepped
    if T & (T - 1):  # not a power of two: fall back to the stepped average
        return _trace(T, trajectory, total / T, False, delta)

    # block doubling: power = P^T, x = x^T, total = s_T
    power = np.linalg.matrix_power(P, T)
    while 2 * T <= episodes:
        total = total + power @ total
        power = power @ power
        power /= power.sum(axis=0, keepdims=True)
        T *= 2
        x = power @ economy.initial_currency
        trajectory.append((T, x.copy()))
        avg = total / T
        delta = float(np.abs(avg - prev_avg).sum())
        prev_avg = avg
        if delta < convergence_tol:
            converged = True
            break
    return _trace(T, trajectory, prev_avg, converged, delta)


def _trace(T, trajectory, avg, converged, delta):
    return SimulationTrace(T, trajectory, _distribution(np.asarray(avg)), converged, float(delta))


# -- renewal view of a single agent ---------------------------------------------

@dataclass(frozen=True)
class ReturnStatistics:
    """How currency returns to one agent when only that agent's column varies.

    ``hit_prob[k]`` is the probability that a dollar starting at ``k`` ever
    reaches ``agent``; ``return_time[k]`` the expected number of episodes to
    get there (``inf`` unless ``hit_prob[k] == 1``). ``sure[k]`` marks agents
    from which the return is certain, decided on the support graph.
    Both depend only on the other agents' columns.
    """

    agent: int
    hit_prob: np.ndarray
    return_time: np.ndarray
    sure: np.ndarray

    def absorbed_mass(self, initial_currency) -> float:
        return float(np.asarray(initial_currency) @ self.hit_prob)


def return_statistics(economy: Economy, agent: int) -> ReturnStatistics:
    P = economy.spending
    n = economy.n
    others = np.array([k for k in range(n) if k != agent], dtype=int)
    adj = support_graph(P).copy()
    adj[agent, :] = False  # the agent's own column is free
    reach = _reaches(adj, agent)
    # agents from which some path avoids the agent forever
    fail = ~reach
    fail[agent] = False
    adj_wo = adj.copy()
    adj_wo[:, agent] = False
    leaks = np.zeros(n, dtype=bool)
    for f in np.flatnonzero(fail):
        leaks |= _reaches(adj_wo, f)
    sure = reach & ~leaks
    sure[agent] = True

    g = np.zeros(n)
    g[agent] = 1.0
    R = others[reach[others]]
    if R.size:
        A = np.eye(R.size) - P[np.ix_(R, R)].T
        g[R] = np.linalg.solve(A, P[agent, R])
    g[sure] = 1.0

    h = np.full(n, np.inf)
    h[agent] = 0.0
    S = others[sure[others]]
    if S.size:
        A = np.eye(S.size) - P[np.ix_(S, S)].T
        h[S] = np.linalg.solve(A, np.ones(S.size))
    return ReturnStatistics(agent, g, h, sure)


def _reaches(adj: np.ndarray, target: int) -> np.ndarray:
    """Boolean mask of nodes with a directed path to ``target``."""
    seen = np.zeros(adj.shape[0], dtype=bool)
    seen[target] = True
    stack = [target]
    while stack:
        v = stack.pop()
        for u in np.flatnonzero(adj[:, v] & ~seen):
            seen[u] = True
            stack.append(u)
    return seen


def column_utilities(economy: Economy, agent: int, columns, stats: ReturnStatistics | None = None) -> np.ndarray:
    """Asymptotic utility of ``agent`` for each candidate spending column.

    Vectorized over ``columns`` (shape ``(m, n)``). Uses renewal: when every
    agent the column buys from returns currency with certainty, the agent's
    long-run share is ``M / (1 + sum_i c_i h_i)`` with ``M`` the initial
    currency that ever reaches it and ``h`` the expected return times;
    otherwise its currency leaks away and the utility is 0. Agrees with
    :func:`asymptotic_utilities` on the substituted economy.
    """
    C = np.atleast_2d(np.asarray(columns, dtype=float))
    if C.shape[1] != economy.n:
        raise DimensionError(f"columns must have {economy.n} entries")
    st = stats if stats is not None else return_statistics(economy, agent)
    u = economy.utility[:, agent]
    leaky = (C[:, ~st.sure] > 0).any(axis=1)
    h = np.where(st.sure, st.return_time, 0.0)
    share = st.absorbed_mass(economy.initial_currency) / (1.0 + C @ h)
    return np.where(leaky, 0.0, share * (C @ u))
