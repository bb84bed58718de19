import logging
from dataclasses import dataclass

import numpy as np
from scipy.stats import norm

from .core import adjustment_components, empirical_sd
from .errors import BandwidthError, DegenerateSeriesError, DimensionMismatchError

log = logging.getLogger("mintt")

DEFAULT_MULTIPLIER = 2.0


@dataclass(frozen=True, eq=False)
class Bandwidths(object):
    """h1 for the intervention coordinate, h2 with one entry per adjustment column."""

    h1: float
    h2: np.ndarray

    def __post_init__(self):
        h2 = np.array(self.h2, dtype=float).ravel()
        if not float(self.h1) > 0:
            raise BandwidthError("h1 must be positive, got {}".format(self.h1))
        if np.any(~(h2 > 0)):
            raise BandwidthError("Every h2 entry must be positive, got {}".format(h2))
        h2.setflags(write=False)
        object.__setattr__(self, "h1", float(self.h1))
        object.__setattr__(self, "h2", h2)

    @property
    def q(self):
        return self.h2.size

    def scaled(self, factor):
        return Bandwidths(self.h1 * factor, self.h2 * factor)

    def as_dict(self):
        return {"h1": self.h1, "h2": self.h2.tolist()}


def _check_bandwidth(h):
    h = np.asarray(h, dtype=float)
    if np.any(~(h > 0)):
        raise BandwidthError("Bandwidth must be positive, got {}".format(h))
    return h


def kernel_weight(u, h):
    """Gaussian kernel K_h(u) = h^-1 phi(u/h)."""
    h = _check_bandwidth(h)
    return norm.pdf(np.asarray(u, dtype=float) / h) / h


def product_kernel_weight(u, h):
    u = np.asarray(u, dtype=float)
    h = _check_bandwidth(h)
    if u.shape[-1:] != h.shape[-1:]:
        raise DimensionMismatchError(
            "Kernel argument has {} coordinates but {} bandwidths".format(
                u.shape[-1] if u.ndim else 1, h.size
            )
        )
    return np.prod(kernel_weight(u, h), axis=-1)


def pairwise_product_weights(points, h):
    """
    m x m matrix with entry (k, j) = prod_i K_{h_i}(points[k, i] - points[j, i]).
    Accumulated in log space one column at a time so memory stays O(m^2).
    """
    points = np.asarray(points, dtype=float)
    h = _check_bandwidth(h)
    m = points.shape[0]
    if points.shape[1] != h.size:
        raise DimensionMismatchError(
            "Got {} columns but {} bandwidths".format(points.shape[1], h.size)
        )
    exponent = np.zeros((m, m))
    for column, bandwidth in zip(points.T, h):
        scaled = column / bandwidth
        exponent -= 0.5 * (scaled[:, None] - scaled[None, :]) ** 2
    log_norm = -np.sum(np.log(h)) - 0.5 * h.size * np.log(2.0 * np.pi)
    return np.exp(exponent + log_norm)


def dimension_factor(n, p, l):  # noqa: E741
    """c_l = n^(1/(4+p) - 1/(4+p*l)); equals 1 for univariate series."""
    return float(n) ** (1.0 / (4 + p) - 1.0 / (4 + p * l))


def rule_of_thumb_bandwidths(ts, query, p, multiplier=DEFAULT_MULTIPLIER, c_l=None):
    """
    h = multiplier * sd for univariate series; for multivariate series every
    bandwidth is scaled by its component's standard deviation and by the
    dimension factor c_l.
    """
    if not multiplier > 0:
        raise BandwidthError("Bandwidth multiplier must be positive")
    sds = np.array([empirical_sd(ts, c) for c in range(ts.l)])
    if np.any(sds <= 0):
        constant = [ts.names[c] for c in np.flatnonzero(sds <= 0)]
        raise DegenerateSeriesError(
            "Cannot choose bandwidths for constant components {}".format(constant)
        )
    if c_l is None:
        c_l = dimension_factor(ts.n, p, ts.l)
    scale = c_l * multiplier
    columns = adjustment_components(ts.l, query.c2, p, query.instantaneous)
    bandwidths = Bandwidths(scale * sds[query.c2], scale * sds[columns])
    log.debug(
        "Rule-of-thumb bandwidths c_l={:.4f} h1={:.4f}".format(c_l, bandwidths.h1)
    )
    return bandwidths
