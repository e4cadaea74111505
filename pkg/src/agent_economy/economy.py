"""Economy data model, admission checks and graph structure of the spending matrix.

Conventions used everywhere in the package:

* ``spending[i, j]`` is the fraction of agent ``j``'s currency spent buying from
  agent ``i``; column ``j`` is agent ``j``'s strategy and every column sums to 1.
* ``utility[i, j]`` is the utility agent ``i`` provides agent ``j`` per dollar
  ``j`` spends on ``i``.
* Currency moves as ``x_next = spending @ x``, so the support graph has an edge
  ``j -> i`` whenever ``spending[i, j] > 0``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

import numpy as np
from scipy.sparse.csgraph import connected_components

STOCHASTIC_TOL = 1e-9


class EconomyError(Exception):
    """Base class for errors raised by this package."""


class DimensionError(EconomyError, ValueError):
    """Matrices and vectors do not have consistent shapes."""


class InvalidEconomyError(EconomyError, ValueError):
    """An economy violates a constraint that a solver relies on."""

    def __init__(self, report: "ValidationReport"):
        self.report = report
        super().__init__("invalid economy: " + "; ".join(str(v) for v in report.violations))


class EconomyFormatError(EconomyError, ValueError):
    """An economy document could not be parsed."""


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Economy:
    """A population of ``n`` trading agents.

    Parameters
    ----------
    spending : array_like, shape (n, n)
        Column-stochastic spending matrix.
    utility : array_like, shape (n, n)
        Per-dollar utilities, nonnegative.
    initial_currency : array_like, shape (n,), optional
        Starting currency summing to 1; uniform when omitted.

    Construction only enforces shapes. Use :func:`validate` (or
    :meth:`require_valid`) to check the numeric constraints.
    """

    spending: np.ndarray
    utility: np.ndarray
    initial_currency: np.ndarray = field(default=None)

    def __post_init__(self):
        P = np.array(self.spending, dtype=float)
        U = np.array(self.utility, dtype=float)
        if P.ndim != 2 or P.shape[0] != P.shape[1] or P.shape[0] == 0:
            raise DimensionError(f"spending must be a non-empty square matrix, got shape {P.shape}")
        n = P.shape[0]
        if U.shape != (n, n):
            raise DimensionError(f"utility must have shape {(n, n)}, got {U.shape}")
        if self.initial_currency is None:
            x0 = np.full(n, 1.0 / n)
        else:
            x0 = np.array(self.initial_currency, dtype=float)
            if x0.shape != (n,):
                raise DimensionError(f"initial_currency must have shape {(n,)}, got {x0.shape}")
        object.__setattr__(self, "spending", _frozen(P))
        object.__setattr__(self, "utility", _frozen(U))
        object.__setattr__(self, "initial_currency", _frozen(x0))

    @property
    def n(self) -> int:
        return self.spending.shape[0]

    def with_column(self, agent: int, column) -> "Economy":
        """Return a copy in which ``agent`` plays ``column``."""
        column = np.asarray(column, dtype=float)
        if column.shape != (self.n,):
            raise DimensionError(f"column must have shape {(self.n,)}, got {column.shape}")
        P = self.spending.copy()
        P[:, agent] = column
        return Economy(P, self.utility, self.initial_currency)

    def with_spending(self, spending) -> "Economy":
        return Economy(spending, self.utility, self.initial_currency)

    def require_valid(self) -> "Economy":
        """Raise :class:`InvalidEconomyError` unless the economy validates."""
        report = validate(self)
        if not report.ok:
            raise InvalidEconomyError(report)
        return self

    def __eq__(self, other):
        if not isinstance(other, Economy):
            return NotImplemented
        return (
            np.array_equal(self.spending, other.spending)
            and np.array_equal(self.utility, other.utility)
            and np.array_equal(self.initial_currency, other.initial_currency)
        )

    __hash__ = None


@dataclass(frozen=True, eq=False)
class CurrencyDistribution:
    """Nonnegative currency masses summing to one."""

    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.ndim != 1:
            raise DimensionError("currency distribution must be one-dimensional")
        if np.any(v < -STOCHASTIC_TOL) or abs(v.sum() - 1.0) > STOCHASTIC_TOL:
            raise ValueError(f"not a currency distribution: {v}")
        object.__setattr__(self, "values", _frozen(v))

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)

    def __len__(self):
        return len(self.values)

    def __getitem__(self, idx):
        return self.values[idx]

    def __iter__(self):
        return iter(self.values)

    def tolist(self) -> list[float]:
        return self.values.tolist()

    def __repr__(self):
        return f"CurrencyDistribution({np.array2string(self.values, precision=6)})"


class Violation(NamedTuple):
    constraint: str
    index: tuple[int, ...]
    observed: float

    def __str__(self):
        return f"{self.constraint} at {self.index}: {self.observed!r}"


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations


def validate(economy: Economy) -> ValidationReport:
    """Check every numeric constraint of an economy.

    Shape problems are raised as :class:`DimensionError` when the economy is
    constructed; this function only reports constraint violations.
    """
    P, U = economy.spending, economy.utility
    out: list[Violation] = []
    for i, j in zip(*np.nonzero(~np.isfinite(P))):
        out.append(Violation("non-finite spending", (int(i), int(j)), float(P[i, j])))
    for i, j in zip(*np.nonzero((P < 0) | (P > 1))):
        out.append(Violation("spending outside [0, 1]", (int(i), int(j)), float(P[i, j])))
    sums = P.sum(axis=0)
    for j in np.nonzero(~(np.abs(sums - 1.0) <= STOCHASTIC_TOL))[0]:
        out.append(Violation("column sum != 1", (int(j),), float(sums[j])))
    for i, j in zip(*np.nonzero(~np.isfinite(U))):
        out.append(Violation("non-finite utility", (int(i), int(j)), float(U[i, j])))
    for i, j in zip(*np.nonzero(U < 0)):
        out.append(Violation("negative utility", (int(i), int(j)), float(U[i, j])))
    x0 = economy.initial_currency
    for k in np.nonzero(~(x0 >= 0))[0]:
        out.append(Violation("negative initial currency", (int(k),), float(x0[k])))
    if not abs(x0.sum() - 1.0) <= STOCHASTIC_TOL:
        out.append(Violation("initial currency does not sum to 1", (), float(x0.sum())))
    return ValidationReport(tuple(out))


def support_graph(spending) -> np.ndarray:
    """Boolean adjacency with ``adj[u, v]`` true iff currency flows ``u -> v``."""
    return np.asarray(spending).T > 0


def _strongly_connected(adj: np.ndarray) -> bool:
    if adj.shape[0] <= 1:
        return True
    ncomp, _ = connected_components(adj, directed=True, connection="strong")
    return ncomp == 1


def strong_components(spending) -> np.ndarray:
    """Label the strongly connected components of the support graph."""
    adj = support_graph(spending)
    _, labels = connected_components(adj, directed=True, connection="strong")
    return labels


def is_irreducible(economy: Economy) -> bool:
    """True iff the support graph of the spending matrix is strongly connected."""
    return _strongly_connected(support_graph(economy.spending))


def sufficient_irreducibility_check(economy: Economy) -> bool:
    """Two-part sufficient condition for irreducibility.

    For every agent ``j``: (1) deleting row and column ``j`` leaves an
    irreducible matrix (a 1x1 remainder counts as irreducible), and (2) some
    ``k != j`` has ``spending[j, k] > 0`` and some ``l != k`` has
    ``spending[l, j] > 0``.
    """
    P = economy.spending
    n = economy.n
    if n < 2:
        raise DimensionError("the sufficient condition needs at least two agents")
    for j in range(n):
        keep = [k for k in range(n) if k != j]
        if not _strongly_connected(support_graph(P[np.ix_(keep, keep)])):
            return False
        buyers = [k for k in keep if P[j, k] > 0]
        if not any(P[l, j] > 0 for k in buyers for l in range(n) if l != k):
            return False
    return True


# -- file format -------------------------------------------------------------

def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def dumps_economy(economy: Economy) -> str:
    """Serialize to the JSON economy document (reals with 17 significant digits)."""

    def row(values):
        return "[" + ", ".join(_fmt(v) for v in values) + "]"

    def matrix(M):
        return "[\n    " + ",\n    ".join(row(r) for r in M) + "\n  ]"

    return (
        "{\n"
        f'  "n": {economy.n},\n'
        f'  "spending": {matrix(economy.spending)},\n'
        f'  "utility": {matrix(economy.utility)},\n'
        f'  "initial_currency": {row(economy.initial_currency)}\n'
        "}\n"
    )


def economy_from_dict(doc: dict) -> Economy:
    if not isinstance(doc, dict):
        raise EconomyFormatError("economy document must be a JSON object")
    unknown = set(doc) - {"n", "spending", "utility", "initial_currency"}
    if unknown:
        raise EconomyFormatError(f"unknown fields: {sorted(unknown)}")
    for key in ("n", "spending", "utility"):
        if key not in doc:
            raise EconomyFormatError(f"missing field {key!r}")
    n = doc["n"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise EconomyFormatError(f"'n' must be a positive integer, got {n!r}")
    try:
        P = np.array(doc["spending"], dtype=float)
        U = np.array(doc["utility"], dtype=float)
        x0 = doc.get("initial_currency")
        x0 = None if x0 is None else np.array(x0, dtype=float)
    except (TypeError, ValueError) as exc:
        raise EconomyFormatError(f"non-numeric entry: {exc}") from exc
    if P.shape != (n, n):
        raise DimensionError(f"spending has shape {P.shape}, expected {(n, n)}")
    return Economy(P, U, x0)


def loads_economy(text: str) -> Economy:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise EconomyFormatError(f"invalid JSON: {exc}") from exc
    return economy_from_dict(doc)


def load_economy(path) -> Economy:
    return loads_economy(Path(path).read_text())


def save_economy(economy: Economy, path) -> None:
    Path(path).write_text(dumps_economy(economy))
