import logging
import time
from dataclasses import dataclass, field
from multiprocessing import Pool
from typing import List, Tuple

import numpy as np

from .config import DEFAULTS, RunConfig
from .core import Query, intervention_values
from .errors import UnknownMethodError
from .estimator import estimate_effect
from .evaluation import mse
from .kernels import rule_of_thumb_bandwidths
from .models import get_builtin_model
from .reference import fit_additive_model, reference_effect
from .simulate import replication_rng, simulate, true_effect

log = logging.getLogger("mintt")

UNIVARIATE_LAGS = 20
MULTIVARIATE_REPETITIONS = 5
MULTIVARIATE_LAGS = 9
# stream for drawing benchmark pairs, disjoint from replication blocks
PAIR_STREAM = 2**31


class Method(object):
    """
    An effect estimator under benchmark. prepare() runs once per series and
    its result is handed to every estimate() call on that series.
    """

    name = None

    def __init__(self, config):
        self.config = config

    def prepare(self, ts, p):
        return None

    def estimate(self, prepared, ts, query, p, seed):
        raise NotImplementedError


class MintTMethod(Method):
    name = "mint-t"

    def estimate(self, prepared, ts, query, p, seed):
        bw = rule_of_thumb_bandwidths(
            ts, query, p, multiplier=self.config.h_mult, c_l=self.config.c_l
        )
        return estimate_effect(ts, query, p, bw, self.config.make_boost_config())


class ReferenceMethod(Method):
    name = "reference"

    def prepare(self, ts, p):
        return fit_additive_model(ts, p)

    def estimate(self, prepared, ts, query, p, seed):
        return reference_effect(
            prepared,
            query,
            self.config.reference_replications,
            self.config.horizon,
            seed,
        )


def get_method(name, config):
    for method in Method.__subclasses__():
        if method.name == name:
            log.debug("Using method: {}".format(method.__name__))
            return method(config)
    raise UnknownMethodError("No estimation method named '{}'".format(name))


@dataclass
class BenchmarkReport(object):
    model_id: int
    method: str
    transform: str
    rule: str
    mse: float
    wall_time_seconds: float
    true_effect_range: Tuple[float, float]
    seeds: List[int]
    pairs: int
    seed_mse: List[float] = field(default_factory=list)

    def __post_init__(self):
        if not self.mse >= 0:
            raise ValueError("MSE must be nonnegative, got {}".format(self.mse))

    def as_dict(self, timing=True, config_hash=None):
        document = {
            "model_id": self.model_id,
            "method": self.method,
            "transform": self.transform,
            "rule": self.rule,
            "mse": self.mse,
            "true_effect_range": list(self.true_effect_range),
            "seeds": list(self.seeds),
            "pairs": self.pairs,
            "seed_mse": list(self.seed_mse),
            "config_hash": config_hash,
        }
        if timing:
            document["wall_time_seconds"] = self.wall_time_seconds
        return document


@dataclass
class BenchmarkInputs(object):
    """One simulated series with its queries and their true effect curves."""

    model: object
    ts: object
    p: int
    queries: list
    truth: list


def benchmark_queries(model, ts, config, seed):
    """
    Univariate models: c1 = c2 with lags 1..20. Multivariate models: five
    uniformly drawn (c1, c2) pairs, each at lags 1..9.
    """
    transform = config.make_transform()

    def values(c2):
        return intervention_values(
            ts, c2, config.rule, config.rule_factor, config["values"]
        )

    if model.l == 1:
        xs = values(0)
        return [
            Query(0, 0, s, xs, transform) for s in range(1, UNIVARIATE_LAGS + 1)
        ]
    rng = replication_rng(seed, PAIR_STREAM)
    queries = []
    for _ in range(MULTIVARIATE_REPETITIONS):
        c1, c2 = (int(c) for c in rng.integers(0, model.l, 2))
        xs = values(c2)
        queries.extend(
            Query(c1, c2, s, xs, transform) for s in range(1, MULTIVARIATE_LAGS + 1)
        )
    return queries


def benchmark_inputs(model_id, config, seed):
    model = get_builtin_model(model_id)
    ts = simulate(model, config.n, seed, config.burn_in)
    queries = benchmark_queries(model, ts, config, seed)
    truth = [
        true_effect(model, query, config.replications, config.horizon, seed)
        for query in queries
    ]
    return BenchmarkInputs(model, ts, config.lag_order(model), queries, truth)


def evaluate_method(method, inputs, seed, p=None):
    """MSE of the method against the true curves and its wall time per pair."""
    p = inputs.p if p is None else p
    start = time.perf_counter()
    prepared = method.prepare(inputs.ts, p)
    estimated = [
        method.estimate(prepared, inputs.ts, query, p, seed) for query in inputs.queries
    ]
    elapsed = time.perf_counter() - start
    return mse(estimated, inputs.truth), elapsed / len(inputs.queries)


def run_cell(job):
    model_id, settings, seed = job
    config = RunConfig(settings)
    inputs = benchmark_inputs(model_id, config, seed)
    score, per_pair = evaluate_method(get_method(config.method, config), inputs, seed)
    effects = np.concatenate([curve.effects for curve in inputs.truth])
    log.info(
        "Benchmark cell model={} method={} seed={} mse={:.6g}".format(
            model_id, config.method, seed, score
        )
    )
    low, high = float(effects.min()), float(effects.max())
    return score, per_pair, low, high, len(inputs.queries)


def _map(func, jobs, workers):
    if workers > 1 and len(jobs) > 1:
        with Pool(min(workers, len(jobs))) as pool:
            return pool.map(func, jobs)
    return [func(job) for job in jobs]


def _settings(config, **overrides):
    settings = dict(DEFAULTS)
    if config:
        settings.update(config)
    settings.update(overrides)
    return RunConfig(settings).validate()


def run_benchmark(model_id, method, transform, rule, config=None, seeds=None):
    """
    Simulates the model once per seed, estimates every benchmark query with
    the method and scores it against the true effect oracle. The reported
    MSE and wall time are averages over seeds.
    """
    config = _settings(config, method=method, transform=transform, rule=rule)
    seeds = list(config.seeds if seeds is None else seeds)
    jobs = [(int(model_id), config.as_dict(), seed) for seed in seeds]
    results = _map(run_cell, jobs, config.workers)
    scores = [result[0] for result in results]
    return BenchmarkReport(
        model_id=int(model_id),
        method=method,
        transform=config.make_transform().name,
        rule=rule,
        mse=float(np.mean(scores)),
        wall_time_seconds=float(np.mean([result[1] for result in results])),
        true_effect_range=(
            min(result[2] for result in results),
            max(result[3] for result in results),
        ),
        seeds=seeds,
        pairs=results[0][4],
        seed_mse=scores,
    )


def compare_reports(mint, reference):
    """
    Relative MSE gain of MINT-T over the reference and how many times faster
    it is per pair.
    """
    gain = None
    if reference.mse > 0:
        gain = (reference.mse - mint.mse) / reference.mse
    acceleration = None
    if mint.wall_time_seconds > 0:
        acceleration = reference.wall_time_seconds / mint.wall_time_seconds
    return {"relative_gain": gain, "acceleration": acceleration}


def bandwidth_study(model_id, multipliers, boost_settings, config=None, seeds=None):
    """
    MINT-T MSE for every (bandwidth multiplier, B_max) combination. True
    effects are simulated once per seed and shared by all settings.
    """
    config = _settings(config, method="mint-t")
    seeds = list(config.seeds if seeds is None else seeds)
    inputs = [benchmark_inputs(model_id, config, seed) for seed in seeds]
    results = []
    for boost in boost_settings:
        for multiplier in multipliers:
            method = MintTMethod(
                _settings(config, h_mult=float(multiplier), boost=int(boost))
            )
            scores = [
                evaluate_method(method, data, seed)[0]
                for data, seed in zip(inputs, seeds)
            ]
            results.append(
                {"h_mult": float(multiplier), "boost": int(boost), "mse": scores}
            )
            log.debug(
                "Bandwidth study h_mult={} boost={}: mean mse {:.6g}".format(
                    multiplier, boost, np.mean(scores)
                )
            )
    return results


def lag_study(model_id, lags, config=None, seeds=None, method="mint-t"):
    """MSE of a method for every lag order p of the adjustment set."""
    config = _settings(config, method=method)
    seeds = list(config.seeds if seeds is None else seeds)
    inputs = [benchmark_inputs(model_id, config, seed) for seed in seeds]
    estimator = get_method(method, config)
    results = []
    for p in lags:
        scores = [
            evaluate_method(estimator, data, seed, p=int(p))[0]
            for data, seed in zip(inputs, seeds)
        ]
        results.append({"p": int(p), "mse": scores})
    return results


def summarize(study, key):
    return {row[key]: float(np.mean(row["mse"])) for row in study}


def benchmark_table_rows(reports, comparison=None):
    rows = []
    for report in reports:
        low, high = report.true_effect_range
        rows.append(
            {
                "method": report.method,
                "mse": "{:.4f}".format(report.mse),
                "time": "{:.4f}".format(report.wall_time_seconds),
                "range": "[{:.4f}, {:.4f}]".format(low, high),
            }
        )
    if comparison is not None:
        gain = comparison.get("relative_gain")
        acceleration = comparison.get("acceleration")
        comparison = {
            "gain": "n/a" if gain is None else "{:+.2f}%".format(100 * gain),
            "acceleration": "n/a"
            if acceleration is None
            else "{:.2f}".format(acceleration),
        }
    return rows, comparison

