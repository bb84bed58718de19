import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import (
    ComponentIndexError,
    DimensionMismatchError,
    EmptyInputError,
    SeriesTooShortError,
)
from .transforms import IdentityTransform, Transform, get_transform

log = logging.getLogger("mintt")

DECILE_PROBABILITIES = np.arange(1, 10) / 10.0

PROVENANCES = ("mint-t", "reference", "true-oracle")


class TimeSeries(object):
    """
    An n x l sample of a stationary process, rows ascending in time and
    columns holding the components.
    """

    def __init__(self, values, names=None):
        values = np.array(values, dtype=float)
        if values.ndim == 1:
            values = values[:, None]
        if values.ndim != 2:
            raise DimensionMismatchError(
                "Time series values must be a matrix, got {} dimensions".format(
                    values.ndim
                )
            )
        if values.shape[0] < 1 or values.shape[1] < 1:
            raise EmptyInputError("Time series must hold at least one observation")
        if not np.all(np.isfinite(values)):
            row, col = np.argwhere(~np.isfinite(values))[0]
            raise ValueError(
                "Time series holds a non-finite value at row {} column {}".format(
                    row, col
                )
            )
        if names is None:
            names = ["X{}".format(c + 1) for c in range(values.shape[1])]
        names = [str(name) for name in names]
        if len(names) != values.shape[1]:
            raise DimensionMismatchError(
                "Got {} names for {} components".format(len(names), values.shape[1])
            )
        if len(set(names)) != len(names):
            raise ValueError("Component names must be unique: {}".format(names))
        values.setflags(write=False)
        self.values = values
        self.names = names

    @property
    def n(self):
        return self.values.shape[0]

    @property
    def l(self):  # noqa: E743
        return self.values.shape[1]

    def component_index(self, component):
        if isinstance(component, str):
            try:
                return self.names.index(component)
            except ValueError:
                raise ComponentIndexError(
                    "No component named '{}' in {}".format(component, self.names)
                )
        index = int(component)
        if not 0 <= index < self.l:
            raise ComponentIndexError(
                "Component index {} out of range for {} components".format(
                    index, self.l
                )
            )
        return index

    def column(self, component):
        return self.values[:, self.component_index(component)]

    def __len__(self):
        return self.n

    def __eq__(self, other):
        return (
            isinstance(other, TimeSeries)
            and self.names == other.names
            and np.array_equal(self.values, other.values)
        )

    def __repr__(self):
        return "TimeSeries(n={}, l={}, names={})".format(self.n, self.l, self.names)


def _is_integral(value):
    try:
        return not isinstance(value, bool) and float(value) == int(value)
    except (TypeError, ValueError, OverflowError):
        return False


@dataclass(frozen=True)
class Query(object):
    """
    One causal question: the effect of do(X_{c2,t-s}=x) on g(X_{c1,t}) for
    every x in intervention_values. Components are 0-based indices.
    """

    c1: int
    c2: int
    s: int
    intervention_values: Sequence[float]
    transform: Transform = field(default_factory=IdentityTransform)
    instantaneous: bool = False

    def __post_init__(self):
        values = np.array(self.intervention_values, dtype=float).ravel()
        if values.size == 0:
            raise EmptyInputError("Intervention values must not be empty")
        if not np.all(np.isfinite(values)):
            raise ValueError("Intervention values must be finite")
        if not _is_integral(self.s) or int(self.s) < 1:
            raise ValueError("Lag s must be a positive integer, got {}".format(self.s))
        if int(self.c1) < 0 or int(self.c2) < 0:
            raise ComponentIndexError(
                "Component indices must be nonnegative, got c1={} c2={}".format(
                    self.c1, self.c2
                )
            )
        values.setflags(write=False)
        object.__setattr__(self, "intervention_values", values)
        object.__setattr__(self, "transform", get_transform(self.transform))
        object.__setattr__(self, "c1", int(self.c1))
        object.__setattr__(self, "c2", int(self.c2))
        object.__setattr__(self, "s", int(self.s))

    def check(self, l):  # noqa: E741
        for name, c in (("c1", self.c1), ("c2", self.c2)):
            if not 0 <= c < l:
                raise ComponentIndexError(
                    "Query {}={} out of range for {} components".format(name, c, l)
                )

    def with_values(self, intervention_values):
        return Query(
            self.c1,
            self.c2,
            self.s,
            intervention_values,
            self.transform,
            self.instantaneous,
        )

    @property
    def key(self):
        return (self.c1, self.c2, self.s, self.transform, self.instantaneous)

    def as_dict(self, names=None):
        document = {
            "c1": self.c1,
            "c2": self.c2,
            "s": self.s,
            "intervention_values": self.intervention_values.tolist(),
            "transform": self.transform.as_dict(),
            "instantaneous": self.instantaneous,
        }
        if names is not None:
            document["c1_name"] = names[self.c1]
            document["c2_name"] = names[self.c2]
        return document

    def __eq__(self, other):
        return (
            isinstance(other, Query)
            and self.key == other.key
            and np.array_equal(self.intervention_values, other.intervention_values)
        )

    def __hash__(self):
        return hash(self.key)


@dataclass(frozen=True, eq=False)
class LaggedDesign(object):
    responses: np.ndarray
    regressors: np.ndarray
    adjustment: np.ndarray
    c1: int
    c2: int
    s: int
    p: int
    instantaneous: bool

    @property
    def m(self):
        return self.responses.shape[0]

    @property
    def q(self):
        return self.adjustment.shape[1]


@dataclass(eq=False)
class EffectCurve(object):
    xs: np.ndarray
    effects: np.ndarray
    query: Query
    provenance: str
    standard_errors: Optional[np.ndarray] = None

    def __post_init__(self):
        self.xs = np.asarray(self.xs, dtype=float)
        self.effects = np.asarray(self.effects, dtype=float)
        if self.xs.shape != self.effects.shape:
            raise DimensionMismatchError(
                "Effect curve has {} intervention values but {} effects".format(
                    self.xs.size, self.effects.size
                )
            )
        if not (np.all(np.isfinite(self.xs)) and np.all(np.isfinite(self.effects))):
            raise ValueError("Effect curve values must be finite")
        if self.provenance not in PROVENANCES:
            raise ValueError("Unknown provenance '{}'".format(self.provenance))
        if self.standard_errors is not None:
            self.standard_errors = np.asarray(self.standard_errors, dtype=float)

    def as_dict(self, names=None, config_hash=None):
        document = {
            "query": self.query.as_dict(names),
            "xs": self.xs.tolist(),
            "effects": self.effects.tolist(),
            "provenance": self.provenance,
            "config_hash": config_hash,
        }
        if self.standard_errors is not None:
            document["standard_errors"] = self.standard_errors.tolist()
        return document


def lag_embed(ts, query, p):
    """
    Builds the m = n-s-p regression samples for a query. Row k of the
    adjustment matrix holds X_{k-s-1}, ..., X_{k-s-p}, each lag laid out
    component-major; with instantaneous effects it is prefixed by the
    contemporaneous X_{c,k-s}, c != c2.
    """
    p = int(p)
    if p < 1:
        raise ValueError("Lag order p must be a positive integer, got {}".format(p))
    query.check(ts.l)
    s = query.s
    n = ts.n
    if n <= s + p:
        raise SeriesTooShortError(
            "Series of length {} is too short for s={} and p={}".format(n, s, p)
        )
    values = ts.values
    rows = np.arange(s + p, n)
    responses = query.transform(values[rows, query.c1])
    regressors = values[rows - s, query.c2].copy()
    blocks = [values[rows - s - j, :] for j in range(1, p + 1)]
    if query.instantaneous:
        others = [c for c in range(ts.l) if c != query.c2]
        blocks.insert(0, values[rows - s][:, others])
    adjustment = np.hstack(blocks) if blocks else np.empty((rows.size, 0))
    return LaggedDesign(
        responses=np.asarray(responses, dtype=float),
        regressors=regressors,
        adjustment=np.ascontiguousarray(adjustment),
        c1=query.c1,
        c2=query.c2,
        s=s,
        p=p,
        instantaneous=query.instantaneous,
    )


def adjustment_components(l, c2, p, instantaneous):  # noqa: E741
    """Component index owning every adjustment column, in lag_embed order."""
    columns = list(range(l)) * p
    if instantaneous:
        columns = [c for c in range(l) if c != c2] + columns
    return np.array(columns, dtype=int)


def deciles(values):
    values = np.asarray(values, dtype=float).ravel()
    if values.size == 0:
        raise EmptyInputError("Cannot compute deciles of an empty sample")
    # numpy's default "linear" method is the h=(m-1)*prob+1 interpolation rule
    return np.quantile(values, DECILE_PROBABILITIES)


def empirical_sd(ts, component):
    column = ts.column(component)
    if column.size < 2:
        raise SeriesTooShortError(
            "Standard deviation needs at least 2 observations, got {}".format(
                column.size
            )
        )
    sd = float(np.std(column, ddof=1))
    if sd == 0.0:
        log.warning(
            "Component '{}' is constant, its standard deviation is 0".format(
                ts.names[ts.component_index(component)]
            )
        )
    return sd


def intervention_values(ts, component, rule="deciles", factor=3.0, values=None):
    if rule == "deciles":
        return deciles(ts.column(component))
    if rule == "scaled-deciles":
        return float(factor) * deciles(ts.column(component))
    if rule == "explicit":
        if values is None or len(values) == 0:
            raise EmptyInputError("The explicit rule needs a list of values")
        return np.asarray(values, dtype=float)
    raise ValueError("Unknown intervention rule '{}'".format(rule))
