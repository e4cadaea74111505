"""Agents that trade a shared currency: long-run dynamics, best responses and equilibria."""
from .best_response import (
    BestResponseResult,
    Method,
    best_response_brute_force,
    best_response_grid_lp,
    rescore_by_dynamics,
    simplex_lattice,
)
from .dynamics import (
    ReducibleChainError,
    SimulationTrace,
    SingularSystemError,
    UtilityProfile,
    asymptotic_utilities,
    cesaro_limit,
    column_utilities,
    long_run_currency,
    per_dollar_utilities,
    simulate,
    stationary_distribution,
    stationary_three_agent_closed_form,
)
from .economy import (
    CurrencyDistribution,
    DimensionError,
    Economy,
    EconomyError,
    EconomyFormatError,
    InvalidEconomyError,
    ValidationReport,
    Violation,
    is_irreducible,
    load_economy,
    loads_economy,
    dumps_economy,
    save_economy,
    sufficient_irreducibility_check,
    validate,
)
from .nash import (
    EquilibriumReport,
    ScenarioError,
    ScenarioName,
    ScenarioSpec,
    check_segregation_necessity,
    make_scenario,
    verify_collaboration,
    verify_equilibrium,
)
from .two_agent import (
    CatalogEntry,
    EquilibriumCatalog,
    Scenario,
    TwoAgentGame,
    TwoAgentStrategy,
    classify_equilibria,
    verify_two_agent_point,
)

__version__ = "0.1.0"
