from dataclasses import replace
from unittest.mock import patch

import numpy as np
import pytest
from scipy.stats import norm

from .core import LaggedDesign, Query, TimeSeries, deciles, lag_embed
from .errors import DimensionMismatchError, EmptyInputError
from .estimator import (
    LOCALLY_CONSTANT,
    PARTIALLY_LOCALLY_LINEAR,
    BoostConfig,
    KernelSmoother,
    boost,
    estimate_effect,
    locally_constant_fit,
    partially_locally_linear_fit,
    stopping_metric,
)
from .kernels import Bandwidths, rule_of_thumb_bandwidths


@pytest.fixture
def design(make_series):
    ts = make_series(n=80, l=2, seed=7)
    return lag_embed(ts, Query(0, 1, 1, [0.0]), 2)


@pytest.fixture
def bandwidths():
    return Bandwidths(0.8, [0.9, 1.1, 0.7, 1.3])


def brute_force_weights(design, x, xS, bw):
    weights = norm.pdf((design.regressors - x) / bw.h1) / bw.h1
    for column, point, h in zip(design.adjustment.T, xS, bw.h2):
        weights = weights * norm.pdf((column - point) / h) / h
    return weights


def random_design(rng):
    m = int(rng.integers(10, 40))
    q = int(rng.integers(1, 4))
    return LaggedDesign(
        responses=rng.standard_normal(m),
        regressors=rng.standard_normal(m),
        adjustment=rng.standard_normal((m, q)),
        c1=0,
        c2=0,
        s=1,
        p=q,
        instantaneous=False,
    )


def test_locally_constant_fit_matches_weighted_mean(design, bandwidths):
    xS = design.adjustment[3]
    weights = brute_force_weights(design, 0.2, xS, bandwidths)
    expected = np.sum(weights * design.responses) / np.sum(weights)
    assert locally_constant_fit(
        design, design.responses, 0.2, xS, bandwidths
    ) == pytest.approx(expected, rel=1e-10)


def test_partially_locally_linear_fit_matches_least_squares(design, bandwidths):
    x, xS = -0.3, design.adjustment[10]
    weights = brute_force_weights(design, x, xS, bandwidths)
    basis = np.column_stack([np.ones(design.m), design.regressors - x])
    root = np.sqrt(weights)
    coefficients, *_ = np.linalg.lstsq(
        basis * root[:, None], design.responses * root, rcond=None
    )
    assert partially_locally_linear_fit(
        design, design.responses, x, xS, bandwidths
    ) == pytest.approx(coefficients[0], rel=1e-6, abs=1e-9)


def test_partially_locally_linear_fit_reproduces_lines(design, bandwidths):
    targets = 2.0 - 3.0 * design.regressors
    for x in (-1.0, 0.0, 0.5):
        fit = partially_locally_linear_fit(
            design, targets, x, design.adjustment[0], bandwidths
        )
        assert fit == pytest.approx(2.0 - 3.0 * x, abs=1e-6)


def test_fits_match_closed_forms_on_random_designs():
    rng = np.random.default_rng(31)
    for _ in range(100):
        design = random_design(rng)
        bw = Bandwidths(rng.uniform(0.5, 1.5), rng.uniform(0.5, 1.5, design.q))
        x = rng.uniform(-1.0, 1.0)
        xS = design.adjustment[rng.integers(design.m)] + 0.1 * rng.standard_normal(
            design.q
        )
        w = brute_force_weights(design, x, xS, bw)
        y = design.responses
        d = design.regressors - x
        assert locally_constant_fit(design, y, x, xS, bw) == pytest.approx(
            np.sum(w * y) / np.sum(w), rel=1e-9, abs=1e-12
        )
        normal = np.array([[w.sum(), w @ d], [w @ d, w @ (d * d)]])
        intercept = np.linalg.solve(normal, [w @ y, w @ (d * y)])[0]
        assert partially_locally_linear_fit(design, y, x, xS, bw) == pytest.approx(
            intercept, rel=1e-9, abs=1e-9
        )


def test_fits_reject_misaligned_inputs(design, bandwidths):
    with pytest.raises(DimensionMismatchError):
        locally_constant_fit(design, design.responses[:-1], 0.0, [0.0] * 4, bandwidths)
    with pytest.raises(DimensionMismatchError):
        locally_constant_fit(design, design.responses, 0.0, [0.0] * 3, bandwidths)
    with pytest.raises(DimensionMismatchError):
        KernelSmoother(design, Bandwidths(1.0, [1.0]))


def test_smoother_matches_pointwise_fits(design, bandwidths):
    smoother = KernelSmoother(design, bandwidths)
    targets = design.responses
    x = 0.4
    constant = smoother.constant_fit_at(x, targets)
    linear = smoother.linear_fit_at(x, targets)
    at_design = smoother.constant_fit_at_design(targets)
    linear_at_design = smoother.linear_fit_at_design(targets)
    for j in range(0, design.m, 9):
        xS = design.adjustment[j]
        assert constant[j] == pytest.approx(
            locally_constant_fit(design, targets, x, xS, bandwidths), rel=1e-9
        )
        assert linear[j] == pytest.approx(
            partially_locally_linear_fit(design, targets, x, xS, bandwidths),
            rel=1e-6,
            abs=1e-9,
        )
        xj = design.regressors[j]
        assert at_design[j] == pytest.approx(
            locally_constant_fit(design, targets, xj, xS, bandwidths), rel=1e-9
        )
        assert linear_at_design[j] == pytest.approx(
            partially_locally_linear_fit(design, targets, xj, xS, bandwidths),
            rel=1e-6,
            abs=1e-9,
        )


def test_smoother_fits_several_layers_at_once(design, bandwidths):
    smoother = KernelSmoother(design, bandwidths)
    layers = np.column_stack([design.responses, design.responses**2])
    both = smoother.constant_fit_at(0.1, layers)
    np.testing.assert_allclose(both[:, 0], smoother.constant_fit_at(0.1, layers[:, 0]))
    np.testing.assert_allclose(both[:, 1], smoother.constant_fit_at(0.1, layers[:, 1]))


@pytest.mark.parametrize(
    "kwargs",
    [
        pytest.param({"B_max": 0}, id="no layers"),
        pytest.param({"stop_abs_frac": 0.0}, id="absolute fraction 0"),
        pytest.param({"stop_ratio": 1.0}, id="ratio 1"),
        pytest.param({"fit_mode": "local_cubic"}, id="unknown fit mode"),
    ],
)
def test_boost_config_rejects(kwargs):
    with pytest.raises(ValueError):
        BoostConfig(**kwargs)


@pytest.mark.parametrize(
    "fit_mode",
    [
        pytest.param(LOCALLY_CONSTANT, id="locally constant"),
        pytest.param(PARTIALLY_LOCALLY_LINEAR, id="partially locally linear"),
    ],
)
def test_marginal_effect_integrates_over_adjustment_samples(
    design, bandwidths, fit_mode
):
    cfg = BoostConfig(B_max=3, stopping_enabled=False, fit_mode=fit_mode)
    model = boost(design, bandwidths, cfg, deciles(design.regressors))
    assert model.B == 3
    for x in (-0.5, 0.7):
        expected = np.mean([model.evaluate(x, xS) for xS in design.adjustment])
        assert model.marginal_effect(x) == pytest.approx(expected, rel=1e-6, abs=1e-9)


def test_boosting_layers_hold_residuals(design, bandwidths):
    cfg = BoostConfig(B_max=3, stopping_enabled=False)
    model = boost(design, bandwidths, cfg, [0.0])
    smoother = model.smoother
    np.testing.assert_array_equal(model.layers[0], design.responses)
    fitted = smoother.constant_fit_at_design(design.responses)
    np.testing.assert_allclose(model.layers[1], design.responses - fitted)
    fitted = fitted + smoother.constant_fit_at_design(model.layers[1])
    np.testing.assert_allclose(model.layers[2], design.responses - fitted)


def marginal_of_fit(design, targets, x, bw):
    return np.mean(
        [locally_constant_fit(design, targets, x, xS, bw) for xS in design.adjustment]
    )


def test_stopping_metric_integrates_the_first_residual_fit(design, bandwidths):
    cfg = BoostConfig(B_max=2, stopping_enabled=False)
    model = boost(design, bandwidths, cfg, [0.0])
    points = [-0.5, 0.5]
    expected = sum(
        abs(marginal_of_fit(design, model.layers[1], x, bandwidths)) for x in points
    )
    initial = sum(
        abs(marginal_of_fit(design, design.responses, x, bandwidths)) for x in points
    )
    metric = stopping_metric(model, 1, points)
    assert metric == pytest.approx(expected, rel=1e-8)
    assert metric != pytest.approx(initial, rel=1e-3)


@pytest.mark.parametrize(
    "b",
    [pytest.param(0, id="initial fit"), pytest.param(3, id="past the last layer")],
)
def test_stopping_metric_rejects_layers_without_residual_fit(design, bandwidths, b):
    cfg = BoostConfig(B_max=3, stopping_enabled=False)
    model = boost(design, bandwidths, cfg, [0.0])
    with pytest.raises(IndexError):
        stopping_metric(model, b, [0.0])


def test_stopping_metric_matches_brute_force_on_random_designs():
    rng = np.random.default_rng(2024)
    for _ in range(100):
        design = random_design(rng)
        bw = Bandwidths(rng.uniform(0.5, 1.5), rng.uniform(0.5, 1.5, design.q))
        model = boost(design, bw, BoostConfig(B_max=2, stopping_enabled=False), [0.0])
        points = rng.uniform(-1.0, 1.0, 3)
        expected = sum(
            abs(marginal_of_fit(design, model.layers[1], x, bw)) for x in points
        )
        assert stopping_metric(model, 1, points) == pytest.approx(
            expected, rel=1e-9, abs=1e-12
        )


def test_stopping_keeps_the_layer_it_measured(design, bandwidths):
    shifted = replace(design, responses=design.responses + 5.0)
    points = [-0.5, 0.5]
    stopping = BoostConfig(B_max=6, stop_abs_frac=0.9)
    stopped = boost(shifted, bandwidths, stopping, points)
    two_layers = BoostConfig(B_max=2, stopping_enabled=False)
    full = boost(shifted, bandwidths, two_layers, points)
    assert stopped.B == 2
    for kept, expected in zip(stopped.layers, full.layers):
        np.testing.assert_array_equal(kept, expected)
    assert stopped.marginal_effect(0.3) == full.marginal_effect(0.3)


def test_single_layer_when_boosting_is_off(design, bandwidths):
    model = boost(design, bandwidths, BoostConfig(B_max=1), [0.0])
    assert model.B == 1
    with pytest.raises(IndexError):
        model.layer_fit(2, 0.0, design.adjustment[0])


def test_boost_needs_evaluation_points(design, bandwidths):
    with pytest.raises(EmptyInputError):
        boost(design, bandwidths, BoostConfig(), [])


def test_zero_response_stops_after_first_layer(make_series):
    ts = make_series(n=60, l=1)
    query = Query(0, 0, 1, [-1.0, 1.0], lambda values: np.zeros_like(values))
    design = lag_embed(ts, query, 2)
    bw = rule_of_thumb_bandwidths(ts, query, 2)
    cfg = BoostConfig(B_max=5, stopping_enabled=False)
    assert boost(design, bw, cfg, [0.0, 1.0]).B == 1

    curve = estimate_effect(ts, query, 2, bw=bw, cfg=cfg)
    np.testing.assert_array_equal(curve.effects, [0.0, 0.0])


def test_constant_response_is_recovered(make_series):
    ts = make_series(n=60, l=1)
    query = Query(0, 0, 2, [-1.0, 0.0, 1.0], lambda values: 0 * values + 5.0)
    curve = estimate_effect(ts, query, 1)
    np.testing.assert_allclose(curve.effects, 5.0, rtol=1e-9)
    assert curve.provenance == "mint-t"
    assert curve.query is query


def test_estimate_effect_defaults_to_rule_of_thumb(ar1_series):
    ts = ar1_series(n=200)
    query = Query(0, 0, 1, [0.0, 1.0])
    default = estimate_effect(ts, query, 2)
    explicit = estimate_effect(
        ts,
        query,
        2,
        bw=rule_of_thumb_bandwidths(ts, query, 2),
        cfg=BoostConfig(),
        eval_points=deciles(ts.column(0)),
    )
    np.testing.assert_array_equal(default.effects, explicit.effects)


@pytest.mark.slow
def test_recovers_linear_autoregressive_effect(ar1_series):
    ts = ar1_series(phi=0.5, n=1000, seed=11)
    xs = deciles(ts.column(0))
    cfg = BoostConfig(fit_mode=PARTIALLY_LOCALLY_LINEAR)
    curve = estimate_effect(ts, Query(0, 0, 1, xs), 1, cfg=cfg)
    assert np.max(np.abs(curve.effects - 0.5 * xs)) < 0.2
    assert np.all(np.diff(curve.effects) > 0)


@pytest.mark.slow
def test_boosting_reduces_smoothing_bias(ar1_series):
    ts = ar1_series(phi=0.5, n=1000, seed=11)
    xs = deciles(ts.column(0))
    query = Query(0, 0, 1, xs)
    single = estimate_effect(ts, query, 1, cfg=BoostConfig(B_max=1))
    boosted = estimate_effect(ts, query, 1, cfg=BoostConfig(B_max=10))
    assert np.all(np.diff(boosted.effects) > 0)
    assert np.sum((boosted.effects - 0.5 * xs) ** 2) < np.sum(
        (single.effects - 0.5 * xs) ** 2
    )


def test_instantaneous_adjustment_widens_the_design():
    rng = np.random.default_rng(5)
    ts = TimeSeries(rng.standard_normal((120, 3)))
    query = Query(0, 1, 1, [0.0], instantaneous=True)
    curve = estimate_effect(ts, query, 1)
    assert curve.effects.shape == (1,)
    assert lag_embed(ts, query, 1).q == 5


def test_degenerate_weights_warn_once_per_estimate(make_series):
    ts = make_series(n=60, l=1, seed=4)
    query = Query(0, 0, 1, [100.0, 101.0])
    bw = Bandwidths(1e-3, [1e-3, 1e-3])
    with patch("mintt.estimator.log") as mocked_log:
        curve = estimate_effect(ts, query, 2, bw=bw, eval_points=[0.0])
    assert mocked_log.warning.call_count == 1
    responses = lag_embed(ts, query, 2).responses
    np.testing.assert_allclose(curve.effects, responses.mean(), rtol=1e-12)


def test_effect_shifts_with_the_series(make_series, bandwidths):
    ts = make_series(n=80, l=2, seed=7)
    shifted = TimeSeries(ts.values + 10.0, ts.names)
    xs = np.array([-0.8, 0.0, 0.6])
    cfg = BoostConfig(B_max=3, stopping_enabled=False)
    base = estimate_effect(ts, Query(0, 1, 1, xs), 2, bw=bandwidths, cfg=cfg)
    moved = estimate_effect(
        shifted, Query(0, 1, 1, xs + 10.0), 2, bw=bandwidths, cfg=cfg
    )
    np.testing.assert_allclose(moved.effects, base.effects + 10.0, rtol=0, atol=1e-8)


def test_huge_bandwidth_gives_the_sample_mean(design):
    bw = Bandwidths(1e4, [1e4] * design.q)
    model = boost(design, bw, BoostConfig(B_max=1), [0.0])
    for x in (-1.0, 0.0, 2.0):
        assert model.marginal_effect(x) == pytest.approx(
            design.responses.mean(), abs=1e-6
        )


@pytest.mark.slow
def test_white_noise_has_no_effect():
    ts = TimeSeries(np.random.default_rng(8).standard_normal((1000, 1)))
    xs = deciles(ts.column(0))
    for s in (1, 2, 3):
        curve = estimate_effect(ts, Query(0, 0, s, xs), 1)
        assert np.max(np.abs(curve.effects)) <= 0.15


@pytest.mark.slow
def test_autoregressive_effect_matches_the_recursion_with_defaults(ar1_series):
    phi = 0.5
    passed = 0
    for seed in range(10):
        ts = ar1_series(phi=phi, n=1000, seed=seed)
        xs = deciles(ts.column(0))
        errors = [
            np.sqrt(
                np.mean(
                    (estimate_effect(ts, Query(0, 0, s, xs), 1).effects - phi**s * xs)
                    ** 2
                )
            )
            for s in (1, 2, 3)
        ]
        passed += max(errors) <= 0.1
    assert passed >= 8
