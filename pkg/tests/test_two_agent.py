import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from agent_economy import (
    Economy,
    Scenario,
    TwoAgentGame,
    TwoAgentStrategy,
    asymptotic_utilities,
    classify_equilibria,
    verify_equilibrium,
    verify_two_agent_point,
)
from agent_economy.two_agent import episode_values, stationary_currency

utility = st.floats(0.0, 5.0, allow_nan=False)
fraction = st.floats(0.0, 1.0, allow_nan=False)


def test_values_at_the_interior_point():
    game = TwoAgentGame(1, 3, 3, 1)
    # u(A) = 2 per dollar held, times the stationary share 1/2
    assert episode_values(game, TwoAgentStrategy(0.5, 0.5)) == pytest.approx((1.0, 1.0))


def test_idle_point_consumes_initial_currency():
    game = TwoAgentGame(2, 1, 1, 4)
    assert stationary_currency(TwoAgentStrategy(0, 0)) is None
    assert episode_values(game, TwoAgentStrategy(0, 0), (0.25, 0.75)) == pytest.approx((0.5, 3.0))


def test_from_economy_reads_the_standard_layout():
    e = Economy(np.array([[0.7, 0.4], [0.3, 0.6]]), np.array([[1.0, 3.0], [3.0, 1.0]]))
    game, strategy = TwoAgentGame.from_economy(e), TwoAgentStrategy.from_economy(e)
    assert (game.a, game.b, game.c, game.d) == (1.0, 3.0, 3.0, 1.0)
    assert (strategy.p, strategy.q) == pytest.approx((0.3, 0.4))
    np.testing.assert_array_equal(game.economy(strategy).spending, e.spending)


@settings(max_examples=200, deadline=None)
@given(utility, utility, utility, utility, fraction, fraction)
def test_closed_form_matches_dynamics(a, b, c, d, p, q):
    game, s = TwoAgentGame(a, b, c, d), TwoAgentStrategy(p, q)
    dynamic = asymptotic_utilities(game.economy(s)).per_agent
    np.testing.assert_allclose(episode_values(game, s), dynamic, atol=1e-9)


def test_table_cases():
    both = classify_equilibria(TwoAgentGame(1, 3, 3, 1))
    assert sorted(both.points()) == [(0.0, 0.0), (0.5, 0.5), (1.0, 1.0)]
    assert classify_equilibria(TwoAgentGame(1, 1.5, 3, 1)).points() == [(0.0, 0.0)]
    one = classify_equilibria(TwoAgentGame(1, 3, 2, 1))
    assert one.scenarios() == [Scenario.NO_ADOPTION, Scenario.UNILATERAL_FULL_A]
    family = one.entries[1]
    assert family.p_range == (1.0, 1.0) and family.q_range == (0.5, 1.0) and family.upper_open


def test_both_conditions_tight_is_flagged():
    catalog = classify_equilibria(TwoAgentGame(1, 2, 2, 1))
    assert Scenario.BILATERAL_FULL in catalog.scenarios()
    assert all("boundary" in e.flags for e in catalog.entries[1:])
    assert all(e.empty for e in catalog.entries if e.scenario is not Scenario.BILATERAL_FULL and not e.is_point)


def test_degenerate_interior_point_is_flagged():
    catalog = classify_equilibria(TwoAgentGame(1, 3, 3, 0))
    partial = [e for e in catalog if e.scenario is Scenario.BILATERAL_PARTIAL]
    assert partial and "degenerate" in partial[0].flags


def test_interval_samples_stay_inside():
    family = classify_equilibria(TwoAgentGame(1, 3, 2, 1)).entries[1]
    qs = [s.q for s in family.samples(7)]
    assert min(qs) == 0.5 and max(qs) < 1.0


@settings(max_examples=150, deadline=None)
@given(utility, utility, utility, utility)
def test_every_catalog_sample_verifies(a, b, c, d):
    game = TwoAgentGame(a, b, c, d)
    for entry in classify_equilibria(game):
        for s in entry.samples(5):
            assert verify_two_agent_point(game, s, tol=1e-6)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.1, 3), st.floats(2.05, 6), st.floats(0.1, 3), st.floats(2.05, 6))
def test_interior_point_formula(a, rb, d, rc):
    game = TwoAgentGame(a, rb * a, rc * d, d)
    catalog = classify_equilibria(game)
    assert (d / (game.c - d), a / (game.b - a)) in catalog.points()


@settings(max_examples=100, deadline=None)
@given(utility, utility)
def test_no_adoption_when_doubling_fails(a, d):
    assume(a > 0 and d > 0)
    game = TwoAgentGame(a, 1.5 * a, 3 * d, d)
    assert classify_equilibria(game).points() == [(0.0, 0.0)]


def test_general_verifier_agrees_with_two_agent_verifier():
    rng = np.random.default_rng(1)
    for _ in range(20):
        game = TwoAgentGame(*rng.uniform(0.1, 5, 4))
        s = TwoAgentStrategy(*rng.choice([0.0, 0.25, 0.5, 1.0], 2))
        general = verify_equilibrium(game.economy(s), resolution=200, tol=1e-6).is_equilibrium
        assert general == verify_two_agent_point(game, s, tol=1e-6, deviations=201)


def test_catalog_serializes():
    doc = classify_equilibria(TwoAgentGame(1, 3, 3, 1)).to_dict()
    assert doc["game"] == {"a": 1, "b": 3, "c": 3, "d": 1}
    assert {e["scenario"] for e in doc["entries"]} == {"no_adoption", "bilateral_partial", "bilateral_full"}
