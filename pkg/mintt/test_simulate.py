import numpy as np
import pytest

from .core import Query
from .errors import ComponentIndexError, NonFiniteTrajectoryError
from .models import ArchModel, ArmaModel, LinearArModel, LinearSem, MultivariateModel
from .simulate import (
    BLOCK_SIZE,
    Intervention,
    default_horizon,
    interventional_effect,
    replication_rng,
    run_paths,
    simulate,
    true_effect,
)


def test_replication_rng_streams_are_keyed_by_seed_and_block():
    first = replication_rng(3, 0).standard_normal(4)
    np.testing.assert_array_equal(first, replication_rng(3, 0).standard_normal(4))
    assert not np.array_equal(first, replication_rng(3, 1).standard_normal(4))
    assert not np.array_equal(first, replication_rng(4, 0).standard_normal(4))


def test_run_paths_shape_and_zero_history():
    model = LinearSem.autoregressive([0.5])
    rng = np.random.default_rng(0)
    paths = run_paths(model, 3, 6, rng)
    assert paths.shape == (3, 6, 1)

    noise = np.random.default_rng(0)
    expected = np.zeros((3, 6))
    previous = np.zeros(3)
    for t in range(6):
        previous = 0.5 * previous + noise.standard_normal((3, 1))[:, 0]
        expected[:, t] = previous
    np.testing.assert_allclose(paths[:, :, 0], expected)


def test_run_paths_intervention_overwrites_one_step():
    model = LinearSem.autoregressive([0.5])
    base = run_paths(model, 2, 5, replication_rng(0))
    hit = run_paths(model, 2, 5, replication_rng(0), Intervention(2, 0, 4.0))
    np.testing.assert_array_equal(hit[:, :2], base[:, :2])
    np.testing.assert_array_equal(hit[:, 2, 0], 4.0)
    np.testing.assert_allclose(
        hit[:, 3, 0] - base[:, 3, 0], 0.5 * (4.0 - base[:, 2, 0])
    )


def test_intervention_propagates_to_instantaneous_children():
    model = LinearSem({1: np.zeros((2, 2))}, instantaneous=[[0.0, 0.0], [2.0, 0.0]])
    base = run_paths(model, 2, 3, replication_rng(1))
    hit = run_paths(model, 2, 3, replication_rng(1), Intervention(1, 0, 1.0))
    np.testing.assert_allclose(
        hit[:, 1, 1] - base[:, 1, 1], 2.0 * (1.0 - base[:, 1, 0])
    )


def test_run_paths_rejects_explosive_models():
    with pytest.raises(NonFiniteTrajectoryError):
        run_paths(LinearSem.autoregressive([10.0]), 2, 1000, replication_rng(0))


def test_simulate_is_deterministic():
    model = MultivariateModel()
    ts = simulate(model, 50, seed=2, burn_in=20)
    assert ts.n == 50
    assert ts.names == ["X1", "X2", "X3", "X4"]
    assert ts == simulate(model, 50, seed=2, burn_in=20)
    assert ts != simulate(model, 50, seed=3, burn_in=20)


def test_simulate_keeps_the_tail_after_burn_in():
    model = LinearArModel()
    full = simulate(model, 30, seed=5, burn_in=0)
    tail = simulate(model, 10, seed=5, burn_in=20)
    np.testing.assert_array_equal(tail.values, full.values[20:])


def test_white_noise_models_agree():
    zero = LinearArModel(coefficients={1: 0.0})
    np.testing.assert_array_equal(
        simulate(zero, 40, seed=8).values,
        simulate(LinearSem.white_noise(), 40, seed=8).values,
    )


@pytest.mark.parametrize(
    "n,burn_in",
    [
        pytest.param(0, 10, id="empty series"),
        pytest.param(10, -1, id="negative burn-in"),
    ],
)
def test_simulate_rejects(n, burn_in):
    with pytest.raises(ValueError):
        simulate(LinearSem.white_noise(), n, burn_in=burn_in)


def test_default_horizon():
    assert default_horizon(LinearArModel(), Query(0, 0, 3, [0.0])) == 63


def test_interventional_effect_of_a_linear_model_is_linear():
    model = LinearArModel()
    query = Query(0, 0, 2, [-1.0, 0.0, 1.0, 2.0])
    curve = interventional_effect(model, query, 500, seed=4)
    slope = (curve.effects[-1] - curve.effects[0]) / 3.0
    np.testing.assert_allclose(
        curve.effects, curve.effects[1] + slope * query.intervention_values, atol=1e-9
    )
    assert slope == pytest.approx(0.4)
    assert curve.provenance == "true-oracle"
    assert curve.standard_errors.shape == (4,)
    assert np.all(curve.standard_errors > 0)


def test_interventional_effect_crosses_blocks():
    model = LinearSem.autoregressive([0.5])
    query = Query(0, 0, 1, [1.0])
    curve = interventional_effect(model, query, BLOCK_SIZE + 10, horizon=5, seed=1)

    total = 0.0
    for block, size in ((0, BLOCK_SIZE), (1, 10)):
        paths = run_paths(
            model, size, 5, replication_rng(1, block), Intervention(3, 0, 1.0)
        )
        total += paths[:, -1, 0].sum()
    assert curve.effects[0] == pytest.approx(total / (BLOCK_SIZE + 10))


def test_arch_square_effect_is_symmetric():
    query = Query(0, 0, 1, [-1.5, 1.5], "square")
    curve = true_effect(ArchModel(), query, N=300, seed=2)
    assert curve.effects[0] == curve.effects[1]
    assert curve.effects[0] > 0


def test_arma_intervention_leaves_moving_average_memory():
    model = ArmaModel()
    base = run_paths(model, 3, 8, replication_rng(0))
    hit = run_paths(model, 3, 8, replication_rng(0), Intervention(4, 0, 2.0))
    np.testing.assert_allclose(
        hit[:, 5, 0] - base[:, 5, 0], 0.4 * (2.0 - base[:, 4, 0])
    )


@pytest.mark.parametrize(
    "kwargs,error",
    [
        pytest.param({"N": 0}, ValueError, id="no replications"),
        pytest.param({"horizon": 11}, ValueError, id="horizon too short"),
        pytest.param(
            {"query": Query(1, 0, 1, [0.0])}, ComponentIndexError, id="bad component"
        ),
    ],
)
def test_interventional_effect_rejects(kwargs, error):
    arguments = {
        "model": LinearArModel(),
        "query": Query(0, 0, 1, [0.0]),
        "N": 10,
    }
    arguments.update(kwargs)
    with pytest.raises(error):
        interventional_effect(**arguments)


def impulse_response(phis, s):
    """g(0) = 1 and g(k) = sum_j phi_j g(k - j): the slope of a linear AR effect."""
    g = [1.0]
    for k in range(1, s + 1):
        g.append(sum(phi * g[k - j] for j, phi in enumerate(phis, 1) if k - j >= 0))
    return g[s]


@pytest.mark.parametrize("s", [1, 2, 6, 10, 12])
def test_linear_effect_slope_follows_the_autoregressive_recursion(s):
    model = LinearArModel()
    curve = true_effect(model, Query(0, 0, s, [-1.0, 1.0]), N=50, seed=s)
    slope = (curve.effects[1] - curve.effects[0]) / 2.0
    assert slope == pytest.approx(
        impulse_response(model.ar_coefficients, s), abs=1e-9
    )


def yule_walker_autocovariances(phis, variance=1.0):
    """gamma(0..P) of a stationary AR(P) from gamma(k) = sum_j phi_j gamma(|k-j|)."""
    order = len(phis)
    system = np.eye(order + 1)
    for k in range(order + 1):
        for j, phi in enumerate(phis, 1):
            system[k, abs(k - j)] -= phi
    rhs = np.zeros(order + 1)
    rhs[0] = variance
    return np.linalg.solve(system, rhs)


@pytest.mark.slow
def test_linear_ar_model_matches_yule_walker_autocovariance():
    model = LinearArModel()
    paths = run_paths(model, 16, 500 + 100000, replication_rng(1))[:, 500:, 0]
    x = paths - paths.mean(axis=1, keepdims=True)
    empirical = np.mean(np.sum(x[:, 2:] * x[:, :-2], axis=1) / x.shape[1])
    gamma = yule_walker_autocovariances(model.ar_coefficients)
    # 16 paths put the standard error near 0.012
    assert empirical == pytest.approx(gamma[2], abs=0.05)
