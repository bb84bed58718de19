import logging
from dataclasses import dataclass

import numpy as np

from .core import EffectCurve, TimeSeries
from .errors import NonFiniteTrajectoryError

log = logging.getLogger("mintt")

DEFAULT_BURN_IN = 500
DEFAULT_HORIZON_MARGIN = 50
# Replications are drawn in blocks of this size, each with its own stream.
BLOCK_SIZE = 2500


def replication_rng(seed, block=0):
    """Philox stream for one block of replications, keyed by (seed, block)."""
    return np.random.Generator(
        np.random.Philox(np.random.SeedSequence([int(seed), int(block)]))
    )


@dataclass(frozen=True)
class Intervention(object):
    """Overwrite component `component` with `value` at 0-based step `step`."""

    step: int
    component: int
    value: float


def run_paths(model, size, steps, rng, intervention=None):
    """
    Generates `size` independent trajectories of `steps` time steps from zero
    initial conditions. Returns an array of shape (size, steps, l).
    """
    order = model.order
    history = np.zeros((size, order + steps, model.l))
    state = model.initial_state(size)
    causal_order = model.causal_order()
    with np.errstate(over="ignore", invalid="ignore"):
        for t in range(steps):
            row = order + t
            lags = history[:, row - order:row][:, ::-1, :]
            noise = model.draw_noise(rng, size)
            current = history[:, row, :]
            model.prepare_state(state, lags)
            for c in causal_order:
                current[:, c] = model.equation(c, lags, current, noise, state)
                if (
                    intervention is not None
                    and t == intervention.step
                    and c == intervention.component
                ):
                    current[:, c] = intervention.value
            model.finish_state(state, current, noise)
    paths = history[:, order:, :]
    finite = np.isfinite(paths).all(axis=(0, 2))
    if not finite.all():
        step = int(np.argmin(finite))
        raise NonFiniteTrajectoryError(
            "{} produced a non-finite value at step {}, the parameterization "
            "is likely explosive".format(model, step + 1)
        )
    return paths


def simulate(model, n, seed=0, burn_in=DEFAULT_BURN_IN):
    """
    Draws burn_in + n steps of the model from zero initial conditions and
    returns the last n as a TimeSeries.
    """
    n = int(n)
    burn_in = int(burn_in)
    if n < 1:
        raise ValueError("Series length must be at least 1, got {}".format(n))
    if burn_in < 0:
        raise ValueError("burn_in must be nonnegative, got {}".format(burn_in))
    log.debug("Simulating {} steps of {} (burn-in {})".format(n, model, burn_in))
    paths = run_paths(model, 1, burn_in + n, replication_rng(seed))
    return TimeSeries(paths[0, burn_in:], model.names)


def default_horizon(model, query):
    return query.s + model.order + DEFAULT_HORIZON_MARGIN


def interventional_effect(
    model, query, N, horizon=None, seed=0, provenance="true-oracle"
):
    """
    Monte-Carlo estimate of E[g(X_{c1,t}) | do(X_{c2,t-s} = x)] for every
    intervention value. Each x reuses the same noise streams, so differences
    between points of the curve carry no sampling noise from the streams.
    """
    query.check(model.l)
    N = int(N)
    if N < 1:
        raise ValueError("Number of replications must be positive, got {}".format(N))
    if horizon is None:
        horizon = default_horizon(model, query)
    horizon = int(horizon)
    if horizon <= query.s + model.order:
        raise ValueError(
            "Horizon {} must exceed s + order = {}".format(
                horizon, query.s + model.order
            )
        )
    # 1-based time horizon - s is 0-based step horizon - s - 1
    step = horizon - query.s - 1
    blocks = [
        (block, min(BLOCK_SIZE, N - start))
        for block, start in enumerate(range(0, N, BLOCK_SIZE))
    ]
    effects = []
    standard_errors = []
    for x in query.intervention_values:
        intervention = Intervention(step, query.c2, float(x))
        total = 0.0
        total_sq = 0.0
        for block, size in blocks:
            paths = run_paths(
                model, size, horizon, replication_rng(seed, block), intervention
            )
            outcome = np.asarray(query.transform(paths[:, -1, query.c1]), dtype=float)
            total += outcome.sum()
            total_sq += (outcome**2).sum()
        mean = total / N
        variance = max(total_sq / N - mean**2, 0.0) * N / max(N - 1, 1)
        effects.append(mean)
        standard_errors.append(np.sqrt(variance / N))
    log.debug(
        "Simulated {} replications for {} intervention values".format(
            N, len(query.intervention_values)
        )
    )
    return EffectCurve(
        query.intervention_values,
        effects,
        query,
        provenance,
        standard_errors=standard_errors,
    )


def true_effect(model, query, N=10000, horizon=None, seed=0):
    """Ground-truth effect curve of a known model by interventional simulation."""
    return interventional_effect(model, query, N, horizon, seed, "true-oracle")
