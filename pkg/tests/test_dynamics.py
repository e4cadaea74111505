import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from agent_economy import (
    DimensionError,
    Economy,
    ReducibleChainError,
    SingularSystemError,
    asymptotic_utilities,
    cesaro_limit,
    column_utilities,
    simulate,
    stationary_distribution,
    stationary_three_agent_closed_form,
)
from agent_economy.dynamics import three_agent_determinant

from conftest import random_column_stochastic, random_irreducible_economy


def eigen_oracle(P):
    """Stationary vector from the eigenvector of eigenvalue 1."""
    w, v = np.linalg.eig(P)
    x = np.real(v[:, np.argmin(np.abs(w - 1))])
    return x / x.sum()


def abel_oracle(P, x0, r=1 - 1e-9):
    """Abel mean ``(1 - r)(I - rP)^-1 x0``; tends to the Cesàro limit as r -> 1."""
    return (1 - r) * np.linalg.solve(np.eye(len(x0)) - r * P, x0)


def test_two_agent_stationary_is_q_over_p_plus_q():
    p, q = 0.3, 0.6
    e = Economy(np.array([[1 - p, q], [p, 1 - q]]), np.ones((2, 2)))
    np.testing.assert_allclose(stationary_distribution(e), [q / (p + q), p / (p + q)], atol=1e-15)


def test_reducible_chain_raises_and_cesaro_handles_it():
    e = Economy(np.eye(3), np.ones((3, 3)), [0.2, 0.3, 0.5])
    with pytest.raises(ReducibleChainError):
        stationary_distribution(e)
    np.testing.assert_allclose(cesaro_limit(e), [0.2, 0.3, 0.5])


def test_transient_agent_drains_into_closed_class():
    # agent 1 spends half on itself, half on agent 2; agents 2 and 3 trade
    P = np.array([[0.5, 0.0, 0.0], [0.5, 0.0, 1.0], [0.0, 1.0, 0.0]])
    e = Economy(P, np.ones((3, 3)), [1.0, 0.0, 0.0])
    np.testing.assert_allclose(cesaro_limit(e), [0.0, 0.5, 0.5], atol=1e-15)


def test_closed_form_requires_three_agents_and_nonsingular_system():
    with pytest.raises(DimensionError):
        stationary_three_agent_closed_form(Economy(np.eye(2), np.ones((2, 2))))
    with pytest.raises(SingularSystemError):
        stationary_three_agent_closed_form(Economy(np.eye(3), np.ones((3, 3))))


def test_determinant_vanishes_for_identity():
    assert three_agent_determinant(np.eye(3)) == 0.0


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 7), st.integers(0, 2**32 - 1))
def test_stationary_matches_eigenvector(n, seed):
    e = random_irreducible_economy(np.random.default_rng(seed), n)
    x = np.asarray(stationary_distribution(e))
    np.testing.assert_allclose(x, eigen_oracle(e.spending), atol=1e-9)
    np.testing.assert_allclose(e.spending @ x, x, atol=1e-12)


@settings(max_examples=200, deadline=None)
@given(st.integers(2, 6), st.floats(0.2, 0.8), st.integers(0, 2**32 - 1))
def test_cesaro_limit_matches_abel_mean(n, density, seed):
    rng = np.random.default_rng(seed)
    P = random_column_stochastic(rng, n, density)
    e = Economy(P, np.ones((n, n)), rng.dirichlet(np.ones(n)))
    limit = np.asarray(cesaro_limit(e))
    np.testing.assert_allclose(limit, abel_oracle(P, e.initial_currency), atol=1e-5)
    assert limit.sum() == pytest.approx(1.0)


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 5), st.floats(0.2, 0.9), st.integers(0, 2**32 - 1))
def test_renewal_scoring_matches_dynamics(n, density, seed):
    rng = np.random.default_rng(seed)
    P = random_column_stochastic(rng, n, density)
    e = Economy(P, rng.uniform(0, 5, (n, n)), rng.dirichlet(np.ones(n)))
    agent = int(rng.integers(n))
    columns = [random_column_stochastic(rng, n, density)[:, 0] for _ in range(6)] + list(np.eye(n))
    fast = column_utilities(e, agent, np.array(columns))
    slow = [asymptotic_utilities(e.with_column(agent, c)).per_agent[agent] for c in columns]
    np.testing.assert_allclose(fast, slow, atol=1e-10)


def test_asymptotic_utility_definition():
    e = Economy(0.5 * (np.ones((3, 3)) - np.eye(3)), np.arange(9.0).reshape(3, 3))
    profile = asymptotic_utilities(e)
    expected = np.full(3, 1 / 3) * (0.5 * (e.utility.sum(axis=0) - np.diag(e.utility)))
    np.testing.assert_allclose(profile.per_agent, expected)


def test_simulation_converges_and_writes_csv():
    e = Economy(np.array([[0.9, 0.2], [0.1, 0.8]]), np.ones((2, 2)), [1.0, 0.0])
    trace = simulate(e)
    assert trace.converged and trace.final_delta < 1e-10
    np.testing.assert_allclose(trace.cesaro_average, [2 / 3, 1 / 3], atol=1e-9)
    lines = trace.to_csv().splitlines()
    assert lines[0] == "episode,x_1,x_2"
    assert lines[1] == "0,1,0"


def test_simulation_averages_a_periodic_chain():
    P = np.roll(np.eye(3), 1, axis=0)
    trace = simulate(Economy(P, np.ones((3, 3)), [1.0, 0.0, 0.0]))
    np.testing.assert_allclose(trace.cesaro_average, [1 / 3] * 3, atol=1e-9)


def test_small_budget_is_respected():
    e = Economy(np.array([[0.9, 0.2], [0.1, 0.8]]), np.ones((2, 2)), [1.0, 0.0])
    trace = simulate(e, episodes=10, thin=3)
    assert trace.episodes == 10 and not trace.converged
    assert [t for t, _ in trace.trajectory] == [0, 3, 6, 9]
    big = simulate(e, episodes=5000)
    assert big.episodes <= 5000


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 6), st.integers(0, 2**32 - 1))
def test_simulation_keeps_currency_on_the_simplex(n, seed):
    rng = np.random.default_rng(seed)
    e = Economy(random_column_stochastic(rng, n, 0.5), np.ones((n, n)), rng.dirichlet(np.ones(n)))
    trace = simulate(e)
    for _, x in trace.trajectory:
        assert np.all(x >= -1e-15) and x.sum() == pytest.approx(1.0, abs=1e-12)
    np.testing.assert_allclose(trace.cesaro_average, cesaro_limit(e), atol=1e-6)
