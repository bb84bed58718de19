import functools
import json
import logging
import os
import sys
from multiprocessing import Pool

import click
from click.core import ParameterSource

from . import config as runconfig
from .benchmark import (
    MintTMethod,
    benchmark_table_rows,
    compare_reports,
    get_method,
    run_benchmark,
)
from .core import Query, intervention_values
from .errors import (
    ComponentIndexError,
    ConfigError,
    CsvParseError,
    EmptyInputError,
    MinttError,
    NonPositiveValueError,
    UnknownMethodError,
    UnknownModelError,
    UnknownTransformError,
)
from .estimator import FIT_MODES
from .evaluation import build_graph, causal_strength, to_dot
from .io import format_csv, load_csv, preprocess_logdiff
from .models import get_builtin_model
from .outputs import OutputBuilder
from .simulate import simulate

log = logging.getLogger("mintt")

EXIT_CONFIG = 10
EXIT_INPUT = 20
EXIT_ESTIMATION = 30
EXIT_OTHER = 40

# keys that configure the command line itself rather than the run
CLI_ONLY = ("config_file", "verbose", "quiet")


def exit_code(exc):
    if isinstance(
        exc,
        (
            ConfigError,
            UnknownModelError,
            UnknownTransformError,
            UnknownMethodError,
            ComponentIndexError,
        ),
    ):
        return EXIT_CONFIG
    if isinstance(exc, (CsvParseError, EmptyInputError, NonPositiveValueError)):
        return EXIT_INPUT
    if isinstance(exc, MinttError):
        return EXIT_ESTIMATION
    return EXIT_OTHER


def setup_logging(verbose, quiet):
    level = logging.WARNING
    if verbose:
        valid_levels = [logging.INFO, logging.DEBUG]
        try:
            level = valid_levels[verbose - 1]
        except IndexError:
            level = logging.DEBUG
    if quiet:
        if not any(isinstance(h, logging.NullHandler) for h in log.handlers):
            log.addHandler(logging.NullHandler())
        log.propagate = False
        return
    log.propagate = True
    logging.basicConfig(level=level)
    log.setLevel(level)


def _split(cast):
    def callback(ctx, param, value):
        if value is None:
            return None
        try:
            return [cast(item) for item in value.split(",") if item.strip()]
        except ValueError:
            raise click.BadParameter("'{}' is not a comma separated list".format(value))

    return callback


def run_options(func):
    options = [
        click.option(
            "--config",
            "config_file",
            type=click.Path(),
            envvar=runconfig.CONFIG_ENV,
            help="JSON file with run settings, overridden by flags",
        ),
        click.option("--input", type=click.Path(), help="CSV file with a header row"),
        click.option("--model", type=int, help="Builtin model id (1-6)"),
        click.option("--n", type=int, help="Length of simulated series"),
        click.option("--seed", type=int, help="Seed of the simulated series"),
        click.option(
            "--seeds", callback=_split(int), help="Comma separated benchmark seeds"
        ),
        click.option("--burn-in", type=int, help="Discarded simulation steps"),
        click.option("--p", type=int, help="Number of past time steps adjusted for"),
        click.option("--h-mult", type=float, help="Bandwidth multiplier of the sd"),
        click.option("--c-l", type=float, help="Dimension factor of the bandwidths"),
        click.option("--boost", type=int, help="Maximal number of boosting layers"),
        click.option("--stopping/--no-stopping", default=None, help="Stopping rule"),
        click.option("--fit-mode", type=click.Choice(FIT_MODES)),
        click.option("--transform", help="Response transform (identity, square, ...)"),
        click.option("--indicator-threshold", type=float),
        click.option(
            "--instantaneous/--no-instantaneous",
            default=None,
            help="Adjust for contemporaneous components",
        ),
        click.option("--c1", type=int, help="Response component (1-based)"),
        click.option("--c2", type=int, help="Intervention component (1-based)"),
        click.option("--s", type=int, help="Lag between intervention and response"),
        click.option("--s-max", type=int, help="Largest lag of the causal graph"),
        click.option("--rule", type=click.Choice(runconfig.RULES)),
        click.option("--rule-factor", type=float),
        click.option(
            "--values", callback=_split(float), help="Explicit intervention values"
        ),
        click.option("--method", type=click.Choice(runconfig.METHODS)),
        click.option("--replications", type=int, help="True-effect replications"),
        click.option("--reference-replications", type=int),
        click.option("--horizon", type=int, help="Simulated steps per replication"),
        click.option("--logdiff/--no-logdiff", default=None, help="Use log returns"),
        click.option("--workers", type=int, help="Parallel worker processes"),
        click.option("--timing/--no-timing", default=None, help="Record wall times"),
        click.option("--out", help="Output directory"),
        click.option(
            "-v", "--verbose", count=True, help="Provide more detailed output"
        ),
        click.option("-q", "--quiet", is_flag=True, help="Silences all output"),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def overrides_from(ctx, params):
    """Only flags that were actually given override the config file."""
    overrides = {}
    for name, value in params.items():
        if name in CLI_ONLY:
            continue
        source = ctx.get_parameter_source(name)
        if source in (ParameterSource.COMMANDLINE, ParameterSource.ENVIRONMENT):
            overrides[name] = value
    return overrides


def command(func):
    """Wraps a cmd_* function into a click command body."""

    @functools.wraps(func)
    def wrapper(**params):
        ctx = click.get_current_context()
        verbose, quiet = params["verbose"], params["quiet"]
        setup_logging(verbose, quiet)
        try:
            cfg = runconfig.resolve(params["config_file"], overrides_from(ctx, params))
            log.info(
                "Resolved configuration: {}".format(
                    json.dumps(cfg.as_dict(), sort_keys=True)
                )
            )
            outputs, out_dir = func(cfg)
            outputs.json("resolved_config.json", cfg.as_dict())
            written = outputs.run(out_dir)
        except MinttError as exc:
            fail(exc, quiet)
        except Exception as exc:
            log.debug("Unexpected failure", exc_info=True)
            fail(exc, quiet)
        if not quiet:
            click.echo("Wrote {} files to '{}'".format(len(written), out_dir))

    return wrapper


def fail(exc, quiet):
    if not quiet:
        message = " ".join(str(exc).split()) or exc.__class__.__name__
        click.echo("Error: {}".format(message), file=sys.stderr)
    sys.exit(exit_code(exc))


def load_series(cfg):
    """The series named by --input, or one simulated from --model."""
    if cfg.input is not None:
        ts = load_csv(cfg.input)
        if cfg.logdiff:
            ts = preprocess_logdiff(ts)
        return ts, None
    if cfg.model is not None:
        model = get_builtin_model(cfg.model)
        return simulate(model, cfg.n, cfg.seed, cfg.burn_in), model
    raise ConfigError("Either an input file or a builtin model is required")


def component(cfg, key, l):  # noqa: E741
    value = cfg[key]
    if not 1 <= value <= l:
        raise ComponentIndexError(
            "{} {} is out of range 1..{}".format(key, value, l)
        )
    return value - 1


def make_query(cfg, ts, c1, c2, s):
    values = intervention_values(
        ts, c2, cfg.rule, cfg.rule_factor, cfg["values"]
    )
    return Query(c1, c2, s, values, cfg.make_transform(), cfg.instantaneous)


def single_method(cfg):
    if cfg.method == "both":
        raise ConfigError("Method 'both' is only available for benchmarks")
    return get_method(cfg.method, cfg)


def estimate_curves(cfg, ts, queries, p):
    method = single_method(cfg)
    prepared = method.prepare(ts, p)
    if cfg.workers > 1 and isinstance(method, MintTMethod):
        jobs = [(cfg.as_dict(), ts, query, p, cfg.seed) for query in queries]
        with Pool(min(cfg.workers, len(jobs))) as pool:
            return pool.map(_estimate_job, jobs)
    return [method.estimate(prepared, ts, query, p, cfg.seed) for query in queries]


def _estimate_job(job):
    settings, ts, query, p, seed = job
    return MintTMethod(runconfig.RunConfig(settings)).estimate(None, ts, query, p, seed)


def cmd_estimate(cfg):
    ts, model = load_series(cfg)
    query = make_query(
        cfg, ts, component(cfg, "c1", ts.l), component(cfg, "c2", ts.l), cfg.s
    )
    (curve,) = estimate_curves(cfg, ts, [query], cfg.lag_order(model))
    outputs = OutputBuilder()
    outputs.json("effect_curve.json", curve.as_dict(ts.names, cfg.hash))
    return outputs, cfg.out


def cmd_benchmark(cfg):
    if cfg.model is None:
        raise ConfigError("Benchmarks need a builtin model")
    methods = ["mint-t", "reference"] if cfg.method == "both" else [cfg.method]
    reports = [
        run_benchmark(cfg.model, method, cfg.transform, cfg.rule, cfg, cfg.seeds)
        for method in methods
    ]
    comparison = None
    if len(reports) == 2:
        comparison = compare_reports(*reports)
        if not cfg.timing:
            comparison.pop("acceleration")
    rows, table_comparison = benchmark_table_rows(reports, comparison)
    outputs = OutputBuilder()
    outputs.json(
        "benchmark_report.json",
        {
            "reports": [report.as_dict(cfg.timing, cfg.hash) for report in reports],
            "comparison": comparison,
            "config_hash": cfg.hash,
        },
    )
    outputs.task_template(
        "benchmark_table.txt",
        "benchmark_table.j2",
        {
            "model_id": cfg.model,
            "transform": reports[0].transform,
            "rule": cfg.rule,
            "seeds": [str(seed) for seed in cfg.seeds],
            "timing": cfg.timing,
            "rows": rows,
            "comparison": table_comparison,
        },
    )
    return outputs, cfg.out


def cmd_graph(cfg):
    ts, model = load_series(cfg)
    queries = [
        make_query(cfg, ts, c1, c2, s)
        for c1 in range(ts.l)
        for c2 in range(ts.l)
        for s in range(1, cfg.s_max + 1)
    ]
    curves = estimate_curves(cfg, ts, queries, cfg.lag_order(model))
    scores = causal_strength(curves, ts, cfg.s_max)
    causal_graph = build_graph(scores, cfg.s_max, cfg.instantaneous)
    document = causal_graph.as_dict(ts.names, cfg.hash)
    document["scores"] = scores
    outputs = OutputBuilder()
    outputs.json("causal_graph.json", document)
    outputs.content("causal_graph.dot", to_dot(causal_graph, ts.names))
    return outputs, cfg.out


def cmd_simulate(cfg):
    if cfg.model is None:
        raise ConfigError("Simulation needs a builtin model")
    ts = simulate(get_builtin_model(cfg.model), cfg.n, cfg.seed, cfg.burn_in)
    out_dir, name = cfg.out, "series.csv"
    if cfg.out.endswith(".csv"):
        out_dir, name = os.path.dirname(cfg.out) or ".", os.path.basename(cfg.out)
    outputs = OutputBuilder()
    outputs.content(name, format_csv(ts))
    return outputs, out_dir


@click.group()
def cli():
    """Total causal effects in stationary time series."""


@cli.command()
@run_options
@command
def estimate(cfg):
    """Estimate one effect curve E[g(X_c1,t) | do(X_c2,t-s = x)]."""
    return cmd_estimate(cfg)


@cli.command()
@run_options
@command
def benchmark(cfg):
    """Score an estimator against the true effects of a builtin model."""
    return cmd_benchmark(cfg)


@cli.command()
@run_options
@command
def graph(cfg):
    """Build a causal graph from the causal strength of every lagged pair."""
    return cmd_graph(cfg)


@cli.command(name="simulate")
@run_options
@command
def simulate_command(cfg):
    """Simulate a builtin model and write it as CSV."""
    return cmd_simulate(cfg)
