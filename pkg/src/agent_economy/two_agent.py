"""Closed forms and the complete equilibrium catalog of the two-agent game.

Agent A spends a fraction ``p`` of its currency on B and B spends ``q`` on A.
Per-dollar utilities: ``a`` (A's self-production), ``b`` (what B provides A),
``c`` (what A provides B) and ``d`` (B's self-production). As an economy::

    spending = [[1 - p, q],      utility = [[a, c],
                [p, 1 - q]]                 [b, d]]
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .economy import Economy

DEFAULT_DEVIATION_POINTS = 1001
EQUILIBRIUM_TOL = 1e-6


@dataclass(frozen=True)
class TwoAgentGame:
    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        if min(self.a, self.b, self.c, self.d) < 0:
            raise ValueError(f"utilities must be nonnegative: {self}")

    @classmethod
    def from_economy(cls, economy: Economy) -> "TwoAgentGame":
        if economy.n != 2:
            raise ValueError(f"a two-agent game needs n = 2, got {economy.n}")
        U = economy.utility
        return cls(a=U[0, 0], b=U[1, 0], c=U[0, 1], d=U[1, 1])

    def utility_matrix(self) -> np.ndarray:
        return np.array([[self.a, self.c], [self.b, self.d]])

    def economy(self, strategy: "TwoAgentStrategy", initial_currency=(0.5, 0.5)) -> Economy:
        return Economy(strategy.spending_matrix(), self.utility_matrix(), initial_currency)


@dataclass(frozen=True)
class TwoAgentStrategy:
    p: float
    q: float

    def __post_init__(self):
        if not (0 <= self.p <= 1 and 0 <= self.q <= 1):
            raise ValueError(f"p and q must lie in [0, 1]: {self}")

    @classmethod
    def from_economy(cls, economy: Economy) -> "TwoAgentStrategy":
        P = economy.spending
        return cls(p=float(P[1, 0]), q=float(P[0, 1]))

    def spending_matrix(self) -> np.ndarray:
        return np.array([[1 - self.p, self.q], [self.p, 1 - self.q]])


def per_dollar_utilities(game: TwoAgentGame, strategy: TwoAgentStrategy) -> tuple[float, float]:
    p, q = strategy.p, strategy.q
    return p * game.b + (1 - p) * game.a, q * game.c + (1 - q) * game.d


def stationary_currency(strategy: TwoAgentStrategy) -> tuple[float, float] | None:
    """Stationary split ``(q, p) / (p + q)``; ``None`` when nobody trades.

    With ``p = q = 0`` every split is stationary and each agent keeps its
    initial currency.
    """
    p, q = strategy.p, strategy.q
    if p + q == 0:
        return None
    return q / (p + q), p / (p + q)


def _values(game, p, q, initial):
    """Vectorized episode values; ``p`` and ``q`` broadcast against each other."""
    p, q = np.broadcast_arrays(np.asarray(p, dtype=float), np.asarray(q, dtype=float))
    s = p + q
    idle = s == 0
    safe = np.where(idle, 1.0, s)
    ua = p * game.b + (1 - p) * game.a
    ub = q * game.c + (1 - q) * game.d
    va = np.where(idle, game.a * initial[0], (q / safe) * ua)
    vb = np.where(idle, game.d * initial[1], (p / safe) * ub)
    return va, vb


def episode_values(
    game: TwoAgentGame, strategy: TwoAgentStrategy, initial_currency=(0.5, 0.5)
) -> tuple[float, float]:
    """Long-run utility per episode ``(V_A, V_B)``.

    ``V_A = q (p b + (1 - p) a) / (p + q)`` and symmetrically for B; at
    ``p = q = 0`` each agent consumes its initial currency forever.
    """
    va, vb = _values(game, strategy.p, strategy.q, initial_currency)
    return float(va), float(vb)


# -- equilibrium catalog -------------------------------------------------------

class Scenario(str, Enum):
    NO_ADOPTION = "no_adoption"
    BILATERAL_PARTIAL = "bilateral_partial"
    BILATERAL_FULL = "bilateral_full"
    UNILATERAL_FULL_A = "unilateral_full_A"
    UNILATERAL_FULL_B = "unilateral_full_B"


@dataclass(frozen=True)
class CatalogEntry:
    """One equilibrium point or one-parameter family.

    ``p_range`` and ``q_range`` are closed-below intervals; when
    ``upper_open`` is set the varying coordinate excludes its upper end.
    """

    scenario: Scenario
    p_range: tuple[float, float]
    q_range: tuple[float, float]
    conditions_met: bool
    proposition: str
    upper_open: bool = False
    flags: tuple[str, ...] = ()

    @property
    def is_point(self) -> bool:
        return self.p_range[0] == self.p_range[1] and self.q_range[0] == self.q_range[1]

    @property
    def strategy(self) -> TwoAgentStrategy | None:
        return TwoAgentStrategy(self.p_range[0], self.q_range[0]) if self.is_point else None

    @property
    def empty(self) -> bool:
        lo_p, hi_p = self.p_range
        lo_q, hi_q = self.q_range
        if self.upper_open:
            return (lo_p == hi_p and lo_q >= hi_q) or (lo_q == hi_q and lo_p >= hi_p)
        return lo_p > hi_p or lo_q > hi_q

    def samples(self, count: int = 5) -> list[TwoAgentStrategy]:
        """Points of the entry; interior points for families."""
        if self.is_point:
            return [self.strategy]
        if self.empty:
            return []
        t = np.linspace(0.0, 1.0, count + 1)[:-1] if self.upper_open else np.linspace(0.0, 1.0, count)
        ps = self.p_range[0] + t * (self.p_range[1] - self.p_range[0])
        qs = self.q_range[0] + t * (self.q_range[1] - self.q_range[0])
        return [TwoAgentStrategy(float(p), float(q)) for p, q in zip(ps, qs)]

    def distance(self, p, q) -> np.ndarray:
        """L-infinity distance from ``(p, q)`` to the closure of the entry."""
        dp = np.maximum(np.maximum(self.p_range[0] - p, p - self.p_range[1]), 0.0)
        dq = np.maximum(np.maximum(self.q_range[0] - q, q - self.q_range[1]), 0.0)
        return np.maximum(dp, dq)

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario.value,
            "p": list(self.p_range),
            "q": list(self.q_range),
            "upper_open": self.upper_open,
            "conditions_met": self.conditions_met,
            "proposition": self.proposition,
            "flags": list(self.flags),
        }


@dataclass(frozen=True)
class EquilibriumCatalog:
    game: TwoAgentGame
    entries: tuple[CatalogEntry, ...] = field(default=())

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)

    def scenarios(self) -> list[Scenario]:
        return [e.scenario for e in self.entries]

    def points(self) -> list[tuple[float, float]]:
        return [(e.p_range[0], e.q_range[0]) for e in self.entries if e.is_point]

    def distance(self, p, q) -> np.ndarray:
        return np.min([e.distance(p, q) for e in self.entries], axis=0)

    def to_dict(self) -> dict:
        g = self.game
        return {"game": {"a": g.a, "b": g.b, "c": g.c, "d": g.d},
                "entries": [e.to_dict() for e in self.entries]}


def _tight(x: float, y: float) -> bool:
    return math.isclose(x, y, rel_tol=1e-12)


def classify_equilibria(game: TwoAgentGame) -> EquilibriumCatalog:
    """List every two-agent equilibrium for the given utilities.

    No adoption is always listed. When both doubling conditions hold strictly
    (``b > 2a`` and ``c > 2d``) the interior point ``(d/(c-d), a/(b-a))`` and
    full adoption ``(1, 1)`` are added. When exactly one holds with equality
    the corresponding full-adoption family is added instead:
    ``c = 2d`` and ``b > 2a`` give ``p = 1`` with ``q`` in ``[a/(b-a), 1)``,
    whose closure contains ``(1, 1)``. With both tight, both (empty) families
    and ``(1, 1)`` are listed and flagged ``boundary``.
    """
    a, b, c, d = game.a, game.b, game.c, game.d
    entries = [CatalogEntry(Scenario.NO_ADOPTION, (0.0, 0.0), (0.0, 0.0), True, "ref:no-adoption")]
    # all-zero utilities make an agent indifferent to everything; the listed
    # entries stay valid but the catalog is no longer exhaustive
    flags_common = () if max(a, b) > 0 and max(c, d) > 0 else ("uniqueness_branch_disabled",)
    tight_a, tight_b = _tight(b, 2 * a), _tight(c, 2 * d)
    if not (b > 2 * a or tight_a) or not (c > 2 * d or tight_b):
        return EquilibriumCatalog(game, tuple(entries))

    if not tight_a and not tight_b:
        p_star, q_star = d / (c - d), a / (b - a)
        flags = flags_common
        if p_star == 0 or q_star == 0:
            flags += ("degenerate",)
        if (p_star, q_star) != (0.0, 0.0):
            entries.append(CatalogEntry(
                Scenario.BILATERAL_PARTIAL, (p_star, p_star), (q_star, q_star), True, "ref:bilateral-partial", flags=flags))
        entries.append(CatalogEntry(
            Scenario.BILATERAL_FULL, (1.0, 1.0), (1.0, 1.0), True, "ref:bilateral-full", flags=flags_common))
        return EquilibriumCatalog(game, tuple(entries))

    boundary = ("boundary",) if tight_a and tight_b else ()
    if tight_b:
        q_lo = a / (b - a) if b > a else 1.0
        entries.append(CatalogEntry(
            Scenario.UNILATERAL_FULL_A, (1.0, 1.0), (min(q_lo, 1.0), 1.0), True, "ref:unilateral-a",
            upper_open=True, flags=flags_common + boundary))
    if tight_a:
        p_lo = d / (c - d) if c > d else 1.0
        entries.append(CatalogEntry(
            Scenario.UNILATERAL_FULL_B, (min(p_lo, 1.0), 1.0), (1.0, 1.0), True, "ref:unilateral-b",
            upper_open=True, flags=flags_common + boundary))
    if tight_a and tight_b:
        entries.append(CatalogEntry(
            Scenario.BILATERAL_FULL, (1.0, 1.0), (1.0, 1.0), True, "ref:bilateral-full", flags=flags_common + boundary))
    return EquilibriumCatalog(game, tuple(entries))


# -- numeric verification --------------------------------------------------------

def deviation_gaps(
    game: TwoAgentGame, p, q, deviations: int = DEFAULT_DEVIATION_POINTS, initial_currency=(0.5, 0.5)
) -> tuple[np.ndarray, np.ndarray]:
    """Best unilateral improvement of each agent at every ``(p, q)``.

    The best deviation of A depends only on ``q`` (and of B only on ``p``), so
    grids of points are handled in ``O(points * deviations)``.
    """
    p, q = np.broadcast_arrays(np.asarray(p, dtype=float), np.asarray(q, dtype=float))
    grid = np.linspace(0.0, 1.0, deviations)
    va, vb = _values(game, p, q, initial_currency)
    uq, q_inv = np.unique(q, return_inverse=True)
    up, p_inv = np.unique(p, return_inverse=True)
    best_a = _values(game, grid[None, :], uq[:, None], initial_currency)[0].max(axis=1)
    best_b = _values(game, up[:, None], grid[None, :], initial_currency)[1].max(axis=1)
    return best_a[q_inv].reshape(p.shape) - va, best_b[p_inv].reshape(p.shape) - vb


def verify_two_agent_point(
    game: TwoAgentGame,
    strategy: TwoAgentStrategy,
    tol: float = EQUILIBRIUM_TOL,
    deviations: int = DEFAULT_DEVIATION_POINTS,
    initial_currency=(0.5, 0.5),
) -> bool:
    """True iff neither agent gains more than ``tol`` on a grid of unilateral deviations."""
    gap_a, gap_b = deviation_gaps(game, strategy.p, strategy.q, deviations, initial_currency)
    return bool(gap_a <= tol and gap_b <= tol)


def equilibrium_mask(
    game: TwoAgentGame, points: int = 101, tol: float = EQUILIBRIUM_TOL,
    deviations: int = DEFAULT_DEVIATION_POINTS,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Verify every point of a ``points x points`` lattice; returns ``(P, Q, passed)``."""
    grid = np.linspace(0.0, 1.0, points)
    P, Q = np.meshgrid(grid, grid, indexing="ij")
    gap_a, gap_b = deviation_gaps(game, P, Q, deviations)
    return P, Q, (gap_a <= tol) & (gap_b <= tol)
