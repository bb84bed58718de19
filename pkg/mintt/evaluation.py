import logging
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from graphviz import Digraph

from .errors import MisalignedCurvesError

log = logging.getLogger("mintt")

GRAPH_QUANTILE = 0.9
MIN_PENWIDTH = 1.0
MAX_PENWIDTH = 5.0


def _check_aligned(estimated, truth):
    if len(estimated) != len(truth):
        raise MisalignedCurvesError(
            "Got {} estimated curves but {} true curves".format(
                len(estimated), len(truth)
            )
        )
    if not estimated:
        raise MisalignedCurvesError("Cannot compare empty curve sets")
    for j, (est, tru) in enumerate(zip(estimated, truth)):
        if est.xs.shape != tru.xs.shape or not np.allclose(est.xs, tru.xs):
            raise MisalignedCurvesError(
                "Curve pair {} is evaluated at different intervention values".format(j)
            )
        if (est.query.c1, est.query.c2, est.query.s) != (
            tru.query.c1,
            tru.query.c2,
            tru.query.s,
        ):
            raise MisalignedCurvesError(
                "Curve pair {} answers different queries".format(j)
            )


def mse(estimated, truth):
    """
    Squared errors summed over intervention values and averaged over curve
    pairs.
    """
    estimated, truth = list(estimated), list(truth)
    _check_aligned(estimated, truth)
    total = sum(
        float(np.sum((est.effects - tru.effects) ** 2))
        for est, tru in zip(estimated, truth)
    )
    return total / len(estimated)


def effect_magnitude(curve, mean, weights=None):
    """sum_i w_i |E(x_i) - mean|, uniform weights unless given."""
    effects = curve.effects if hasattr(curve, "effects") else np.asarray(curve)
    deviations = np.abs(np.asarray(effects, dtype=float) - mean)
    if weights is None:
        return float(deviations.sum())
    weights = np.asarray(weights, dtype=float)
    if weights.shape != deviations.shape:
        raise MisalignedCurvesError(
            "Got {} weights for {} effects".format(weights.size, deviations.size)
        )
    return float(weights @ deviations)


def causal_strength(curves, ts, s_max=None):
    """
    CS[c1, c2, s-1]: the deviation of the (c1, c2, s) effect curve from the
    sample mean of g(X_c1), minus the average of that deviation over
    s = 1..s_max, relative to the sample mean. Pairs without curves and
    pairs whose sample mean is 0 stay NaN.
    """
    curves = list(curves)
    if not curves:
        raise MisalignedCurvesError("Causal strength needs at least one curve")
    by_key = {}
    for curve in curves:
        key = (curve.query.c1, curve.query.c2, curve.query.s)
        if key in by_key:
            raise MisalignedCurvesError("Duplicate curve for {}".format(key))
        by_key[key] = curve
    if s_max is None:
        s_max = max(s for _, _, s in by_key)
    s_max = int(s_max)
    l = ts.l  # noqa: E741
    scores = np.full((l, l, s_max), np.nan)
    pairs = sorted({(c1, c2) for c1, c2, _ in by_key})
    for c1, c2 in pairs:
        missing = [s for s in range(1, s_max + 1) if (c1, c2, s) not in by_key]
        if missing:
            raise MisalignedCurvesError(
                "Curves for {}->{} lack lags {}".format(
                    ts.names[c2], ts.names[c1], missing
                )
            )
        transform = by_key[(c1, c2, 1)].query.transform
        mean = float(np.mean(transform(ts.column(c1))))
        if mean == 0.0:
            log.warning(
                "Sample mean of g({}) is 0, causal strength of {}->{} is "
                "unscored".format(ts.names[c1], ts.names[c2], ts.names[c1])
            )
            continue
        deviations = np.array(
            [
                effect_magnitude(by_key[(c1, c2, s)], mean)
                for s in range(1, s_max + 1)
            ]
        )
        scores[c1, c2] = (deviations - deviations.mean()) / mean
    return scores


@dataclass(frozen=True)
class Edge(object):
    """X_{c2, t-s} -> X_{c1, t} with its causal strength."""

    c2: int
    s: int
    c1: int
    weight: float

    def as_dict(self, names=None):
        document = {
            "from": [self.c2, self.s],
            "to": [self.c1, 0],
            "weight": self.weight,
        }
        if names is not None:
            document["from_name"] = names[self.c2]
            document["to_name"] = names[self.c1]
        return document


@dataclass
class CausalGraph(object):
    l: int  # noqa: E741
    s_max: int
    threshold: Optional[float]
    edges: List[Edge] = field(default_factory=list)
    instantaneous: bool = False

    @property
    def nodes(self):
        return [(c, s) for c in range(self.l) for s in range(self.s_max + 1)]

    def as_dict(self, names=None, config_hash=None):
        nodes = []
        for c, s in self.nodes:
            node = {"component": c, "lag": s}
            if names is not None:
                node["name"] = names[c]
            nodes.append(node)
        return {
            "nodes": nodes,
            "edges": [edge.as_dict(names) for edge in self.edges],
            "threshold": self.threshold,
            "instantaneous": self.instantaneous,
            "config_hash": config_hash,
        }


def build_graph(cs, s_max=None, instantaneous=False):
    """
    Keeps the scores strictly above the ninth decile of all finite scores as
    edges, strongest first.
    """
    cs = np.asarray(cs, dtype=float)
    l = cs.shape[0]  # noqa: E741
    if s_max is None:
        s_max = cs.shape[2]
    finite = cs[np.isfinite(cs)]
    if finite.size == 0:
        log.warning("No finite causal strength scores, the graph has no edges")
        return CausalGraph(l, s_max, None, [], instantaneous)
    threshold = float(np.quantile(finite, GRAPH_QUANTILE))
    edges = [
        Edge(c2=int(c2), s=int(s) + 1, c1=int(c1), weight=float(cs[c1, c2, s]))
        for c1, c2, s in zip(*np.nonzero(np.isfinite(cs) & (cs > threshold)))
    ]
    edges.sort(key=lambda edge: (-edge.weight, edge.c1, edge.c2, edge.s))
    log.info(
        "Kept {} of {} scores above threshold {:.6g}".format(
            len(edges), finite.size, threshold
        )
    )
    return CausalGraph(l, s_max, threshold, edges, instantaneous)


def _node_id(c, s):
    return "c{}_s{}".format(c, s)


def to_dot(graph, names=None, name="mintt"):
    """
    DOT source for a causal graph. Pen width grows linearly from the weakest
    to the strongest surviving edge.
    """
    if names is None:
        names = ["X{}".format(c + 1) for c in range(graph.l)]
    dot = Digraph(name=name)
    dot.attr(rankdir="LR")
    for c, s in graph.nodes:
        label = "{} t".format(names[c]) if s == 0 else "{} t-{}".format(names[c], s)
        dot.node(_node_id(c, s), label)
    weights = [edge.weight for edge in graph.edges]
    low, high = (min(weights), max(weights)) if weights else (0.0, 0.0)
    for edge in graph.edges:
        if high > low:
            fraction = (edge.weight - low) / (high - low)
        else:
            fraction = 1.0
        penwidth = MIN_PENWIDTH + fraction * (MAX_PENWIDTH - MIN_PENWIDTH)
        dot.edge(
            _node_id(edge.c2, edge.s),
            _node_id(edge.c1, 0),
            label="{:.4g}".format(edge.weight),
            penwidth="{:.3f}".format(penwidth),
        )
    return dot.source
