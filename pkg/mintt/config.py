import json
import logging
import os

from . import utils
from .errors import ConfigError
from .estimator import FIT_MODES, BoostConfig
from .transforms import get_transform

log = logging.getLogger("mintt")

CONFIG_ENV = "MINTT_CONFIG"

RULES = ("deciles", "scaled-deciles", "explicit")
# "both" runs mint-t and the reference side by side in benchmarks
METHODS = ("mint-t", "reference", "both")

DEFAULTS = {
    "input": None,
    "model": None,
    "n": 1000,
    "seed": 0,
    "seeds": [0],
    "burn_in": 500,
    "p": None,
    "h_mult": 2.0,
    "c_l": None,
    "boost": 10,
    "stopping": True,
    "stop_abs_frac": 0.005,
    "stop_ratio": 0.75,
    "fit_mode": "locally_constant",
    "transform": "identity",
    "indicator_threshold": 0.0,
    "instantaneous": False,
    "c1": 1,
    "c2": 1,
    "s": 1,
    "s_max": 9,
    "rule": "deciles",
    "rule_factor": 3.0,
    "values": None,
    "method": "mint-t",
    "replications": 10000,
    "reference_replications": 1000,
    "horizon": None,
    "logdiff": False,
    "workers": 1,
    "timing": True,
    "out": "mint-t-output",
}

FALLBACK_P = 10
# settings that leave every result unchanged
UNHASHED = ("out", "workers", "timing")


def _positive_int(key, value, minimum=1):
    if isinstance(value, bool) or not isinstance(value, int) or value < minimum:
        raise ConfigError(
            "'{}' must be an integer >= {}, got {!r}".format(key, minimum, value)
        )


def _positive_number(key, value):
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not value > 0:
        raise ConfigError("'{}' must be a positive number, got {!r}".format(key, value))


def _fraction(key, value):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError("'{}' must be a number, got {!r}".format(key, value))
    if not 0 < value < 1:
        raise ConfigError("'{}' must lie in (0, 1), got {!r}".format(key, value))


def _choice(key, value, choices):
    if value not in choices:
        raise ConfigError(
            "'{}' must be one of {}, got {!r}".format(key, ", ".join(choices), value)
        )


class RunConfig(utils.RecursiveDictAttributes):
    """
    The resolved settings of one command. Components c1 and c2 are 1-based
    here, as on the command line.
    """

    def as_dict(self):
        return {key: self[key] for key in sorted(self)}

    def hashed_settings(self):
        return {
            key: value for key, value in self.as_dict().items() if key not in UNHASHED
        }

    @property
    def hash(self):
        return utils.config_hash(self.hashed_settings())

    # pylama:ignore=C901
    def validate(self):
        unknown = sorted(set(self) - set(DEFAULTS))
        if unknown:
            raise ConfigError(
                "Unknown configuration keys: {}".format(", ".join(unknown))
            )
        for key in ("n", "boost", "s", "s_max", "c1", "c2", "replications"):
            _positive_int(key, self[key])
        _positive_int("reference_replications", self.reference_replications)
        _positive_int("workers", self.workers)
        _positive_int("burn_in", self.burn_in, minimum=0)
        _positive_int("seed", self.seed, minimum=0)
        if not isinstance(self.seeds, list) or not self.seeds:
            raise ConfigError("'seeds' must be a nonempty list of integers")
        for seed in self.seeds:
            _positive_int("seeds", seed, minimum=0)
        for key in ("p", "horizon"):
            if self[key] is not None:
                _positive_int(key, self[key])
        _positive_number("h_mult", self.h_mult)
        _positive_number("rule_factor", self.rule_factor)
        if self.c_l is not None:
            _positive_number("c_l", self.c_l)
        _fraction("stop_abs_frac", self.stop_abs_frac)
        _fraction("stop_ratio", self.stop_ratio)
        _choice("fit_mode", self.fit_mode, FIT_MODES)
        _choice("rule", self.rule, RULES)
        _choice("method", self.method, METHODS)
        if self.rule == "explicit" and not self["values"]:
            raise ConfigError("The explicit rule needs a nonempty 'values' list")
        if self["values"] is not None and not isinstance(self["values"], list):
            raise ConfigError("'values' must be a list of numbers")
        if self.input is not None and self.model is not None:
            raise ConfigError("Use either 'input' or 'model', not both")
        try:
            self.make_transform()
        except LookupError as e:
            raise ConfigError(str(e))
        return self

    def lag_order(self, model=None):
        if self.p is not None:
            return self.p
        if model is not None and model.default_p is not None:
            return model.default_p
        return FALLBACK_P

    def make_transform(self):
        if self.transform == "indicator":
            return get_transform("indicator", threshold=self.indicator_threshold)
        return get_transform(self.transform)

    def make_boost_config(self):
        return BoostConfig(
            B_max=self.boost,
            stop_abs_frac=self.stop_abs_frac,
            stop_ratio=self.stop_ratio,
            stopping_enabled=self.stopping,
            fit_mode=self.fit_mode,
        )


def normalize_keys(document):
    return {str(key).replace("-", "_"): value for key, value in document.items()}


def load_config(path):
    try:
        with open(path, "r") as f:
            document = json.load(f)
    except OSError as e:
        raise ConfigError("Cannot read config file '{}': {}".format(path, e))
    except ValueError as e:
        raise ConfigError("Config file '{}' is not valid JSON: {}".format(path, e))
    if not isinstance(document, dict):
        raise ConfigError("Config file '{}' must hold a JSON object".format(path))
    document = normalize_keys(document)
    unknown = sorted(set(document) - set(DEFAULTS))
    if unknown:
        raise ConfigError(
            "Unknown keys in config file '{}': {}".format(path, ", ".join(unknown))
        )
    log.debug("Loaded {} settings from '{}'".format(len(document), path))
    return document


def resolve(config_file=None, overrides=None):
    """Defaults, then the config file, then explicitly given overrides."""
    settings = dict(DEFAULTS)
    config_file = config_file or os.environ.get(CONFIG_ENV)
    if config_file:
        settings.update(load_config(config_file))
    if overrides:
        settings.update(normalize_keys(overrides))
    return RunConfig(settings).validate()
