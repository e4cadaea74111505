"""Dense two-phase simplex with Bland's rule, sized for the small LPs of the best-response search."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .economy import DimensionError

PIVOT_TOL = 1e-11
FEAS_TOL = 1e-9


class LPStatus(str, Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LinearProgram:
    """``maximize objective @ x`` s.t. ``A_eq x = b_eq``, ``A_ub x <= b_ub``, ``x >= 0``."""

    objective: np.ndarray
    A_eq: np.ndarray | None = None
    b_eq: np.ndarray | None = None
    A_ub: np.ndarray | None = None
    b_ub: np.ndarray | None = None

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.objective, dtype=float))
        if c.ndim != 1:
            raise DimensionError("objective must be a vector")
        object.__setattr__(self, "objective", c)
        for A_name, b_name in (("A_eq", "b_eq"), ("A_ub", "b_ub")):
            A, b = getattr(self, A_name), getattr(self, b_name)
            if A is None and b is None:
                A, b = np.zeros((0, c.size)), np.zeros(0)
            elif A is None or b is None:
                raise DimensionError(f"{A_name} and {b_name} must be given together")
            A = np.atleast_2d(np.asarray(A, dtype=float))
            b = np.atleast_1d(np.asarray(b, dtype=float))
            if A.shape != (b.size, c.size):
                raise DimensionError(f"{A_name} has shape {A.shape}, expected {(b.size, c.size)}")
            object.__setattr__(self, A_name, A)
            object.__setattr__(self, b_name, b)

    @property
    def num_vars(self) -> int:
        return self.objective.size


@dataclass(frozen=True)
class LPResult:
    status: LPStatus
    x: np.ndarray | None = None
    objective: float | None = None

    @property
    def optimal(self) -> bool:
        return self.status is LPStatus.OPTIMAL


def _pivot(T: np.ndarray, basis: list[int], row: int, col: int) -> None:
    T[row] /= T[row, col]
    for r in range(T.shape[0]):
        if r != row and T[r, col] != 0.0:
            T[r] -= T[r, col] * T[row]
    basis[row] = col


def _bland(T: np.ndarray, basis: list[int], allowed: int) -> bool:
    """Maximize the objective in the last row (stored as reduced costs ``-c``).

    Returns False if unbounded. Only the first ``allowed`` columns may enter.
    """
    m = T.shape[0] - 1
    while True:
        reduced = T[-1, :allowed]
        entering = np.flatnonzero(reduced < -PIVOT_TOL)
        if entering.size == 0:
            return True
        col = int(entering[0])
        column = T[:m, col]
        rows = np.flatnonzero(column > PIVOT_TOL)
        if rows.size == 0:
            return False
        ratios = T[rows, -1] / column[rows]
        best = ratios.min()
        ties = rows[ratios <= best + PIVOT_TOL * max(1.0, abs(best))]
        row = int(min(ties, key=lambda r: basis[r]))
        _pivot(T, basis, row, col)


def solve_lp(lp: LinearProgram) -> LPResult:
    """Solve a small dense LP; infeasible and unbounded are ordinary results."""
    nv = lp.num_vars
    m_eq, m_ub = lp.b_eq.size, lp.b_ub.size
    m = m_eq + m_ub
    # standard form with slacks for the <= rows
    A = np.zeros((m, nv + m_ub))
    A[:m_eq, :nv] = lp.A_eq
    A[m_eq:, :nv] = lp.A_ub
    A[m_eq:, nv:] = np.eye(m_ub)
    b = np.concatenate([lp.b_eq, lp.b_ub])
    flip = b < 0
    A[flip] *= -1
    b = np.where(flip, -b, b)
    ns = nv + m_ub

    # phase 1: artificial basis, minimize the artificial sum
    T = np.zeros((m + 1, ns + m + 1))
    T[:m, :ns] = A
    T[:m, ns:ns + m] = np.eye(m)
    T[:m, -1] = b
    T[-1, :ns] = -A.sum(axis=0)
    T[-1, -1] = -b.sum()
    basis = list(range(ns, ns + m))
    _bland(T, basis, ns)
    if -T[-1, -1] > FEAS_TOL * max(1.0, np.abs(b).max(initial=0.0)):
        return LPResult(LPStatus.INFEASIBLE)

    # drive zero-valued artificials out; drop rows that are redundant
    keep = []
    for r in range(m):
        if basis[r] >= ns:
            candidates = np.flatnonzero(np.abs(T[r, :ns]) > 1e-9)
            if candidates.size == 0:
                continue
            _pivot(T, basis, r, int(candidates[0]))
        keep.append(r)
    T2 = np.zeros((len(keep) + 1, ns + 1))
    T2[:-1, :ns] = T[keep, :ns]
    T2[:-1, -1] = T[keep, -1]
    basis = [basis[r] for r in keep]

    # phase 2
    c = np.zeros(ns)
    c[:nv] = lp.objective
    T2[-1, :ns] = -c
    for r, var in enumerate(basis):
        T2[-1] += c[var] * T2[r]
    if not _bland(T2, basis, ns):
        return LPResult(LPStatus.UNBOUNDED)
    x = np.zeros(ns)
    for r, var in enumerate(basis):
        x[var] = T2[r, -1]
    x = np.maximum(x[:nv], 0.0)
    return LPResult(LPStatus.OPTIMAL, x, float(lp.objective @ x))
