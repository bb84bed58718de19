import logging
from dataclasses import dataclass

import numpy as np

from .core import EffectCurve, deciles, lag_embed
from .errors import DimensionMismatchError, EmptyInputError
from .kernels import (
    kernel_weight,
    pairwise_product_weights,
    product_kernel_weight,
    rule_of_thumb_bandwidths,
)

log = logging.getLogger("mintt")

LOCALLY_CONSTANT = "locally_constant"
PARTIALLY_LOCALLY_LINEAR = "partially_locally_linear"
FIT_MODES = (LOCALLY_CONSTANT, PARTIALLY_LOCALLY_LINEAR)

# Kernel weight sums below EPS_WEIGHT * m count as degenerate.
EPS_WEIGHT = 1e-300
RIDGE = 1e-8
# Weighted variance of the intervention coordinate, relative to h1^2, under
# which the local slope is unidentified.
FLAT_DESIGN = 1e-12
NEAR_SINGULAR = 1e-8


@dataclass(frozen=True)
class BoostConfig(object):
    B_max: int = 10
    stop_abs_frac: float = 0.005
    stop_ratio: float = 0.75
    stopping_enabled: bool = True
    fit_mode: str = LOCALLY_CONSTANT

    def __post_init__(self):
        if int(self.B_max) < 1:
            raise ValueError("B_max must be at least 1, got {}".format(self.B_max))
        for name in ("stop_abs_frac", "stop_ratio"):
            value = getattr(self, name)
            if not 0 < value < 1:
                raise ValueError("{} must lie in (0, 1), got {}".format(name, value))
        if self.fit_mode not in FIT_MODES:
            raise ValueError(
                "fit_mode must be one of {}, got '{}'".format(FIT_MODES, self.fit_mode)
            )
        object.__setattr__(self, "B_max", int(self.B_max))

    def as_dict(self):
        return {
            "B_max": self.B_max,
            "stop_abs_frac": self.stop_abs_frac,
            "stop_ratio": self.stop_ratio,
            "stopping_enabled": self.stopping_enabled,
            "fit_mode": self.fit_mode,
        }


def _check_targets(design, targets):
    targets = np.asarray(targets, dtype=float)
    if targets.shape[0] != design.m:
        raise DimensionMismatchError(
            "Got {} targets for a design with {} samples".format(
                targets.shape[0], design.m
            )
        )
    return targets


def _point_weights(design, x, xS, bw):
    xS = np.asarray(xS, dtype=float).ravel()
    if xS.size != design.q:
        raise DimensionMismatchError(
            "Adjustment point has {} coordinates, design has {}".format(
                xS.size, design.q
            )
        )
    return kernel_weight(design.regressors - x, bw.h1) * product_kernel_weight(
        design.adjustment - xS, bw.h2
    )


def _local_linear_alpha(S0, S1, S2, T0, T1, h1):
    """
    Intercept of the weighted least-squares line from its sufficient
    statistics; falls back to the weighted mean T0/S0 where the weighted
    intervention coordinates carry no spread.
    """
    S0, S1, S2, T0, T1 = np.broadcast_arrays(*map(np.asarray, (S0, S1, S2, T0, T1)))
    mean_d = S1 / S0
    spread = S2 / S0 - mean_d**2
    flat = spread <= FLAT_DESIGN * h1**2
    ridge = np.where(spread <= NEAR_SINGULAR * S2 / S0, RIDGE * S0, 0.0)
    S2r = S2 + ridge
    det = S0 * S2r - S1**2
    safe_det = np.where(flat | (det <= 0), 1.0, det)
    alpha = (S2r * T0 - S1 * T1) / safe_det
    return np.where(flat | (det <= 0), T0 / S0, alpha)


def locally_constant_fit(design, targets, x, xS, bw):
    """Nadaraya-Watson fit of targets at (x, xS) with product Gaussian weights."""
    targets = _check_targets(design, targets)
    weights = _point_weights(design, x, xS, bw)
    total = weights.sum()
    if total < EPS_WEIGHT * design.m:
        log.debug("Degenerate kernel weights at x={}, using the plain mean".format(x))
        return float(targets.mean())
    return float(weights @ targets / total)


def partially_locally_linear_fit(design, targets, x, xS, bw):
    """
    Minimises sum_k (targets_k - a - b (regressor_k - x))^2 w_k and returns a:
    linear in the intervention coordinate, constant in the adjustment set.
    """
    targets = _check_targets(design, targets)
    weights = _point_weights(design, x, xS, bw)
    S0 = weights.sum()
    if S0 < EPS_WEIGHT * design.m:
        log.debug("Degenerate kernel weights at x={}, using the plain mean".format(x))
        return float(targets.mean())
    d = design.regressors - x
    wd = weights * d
    return float(
        _local_linear_alpha(
            S0, wd.sum(), wd @ d, weights @ targets, wd @ targets, bw.h1
        )
    )


class KernelSmoother(object):
    """
    Kernel fits over one LaggedDesign for fixed bandwidths. The m x m matrix
    of adjustment weights L[k, j] = L_h2(adjustment_k - adjustment_j) is
    computed once and reused for every boosting layer and intervention value.
    """

    def __init__(self, design, bandwidths):
        if bandwidths.q != design.q:
            raise DimensionMismatchError(
                "Bandwidths cover {} adjustment columns, design has {}".format(
                    bandwidths.q, design.q
                )
            )
        self.design = design
        self.bandwidths = bandwidths
        self.threshold = EPS_WEIGHT * design.m
        self.adjustment_weights = pairwise_product_weights(
            design.adjustment, bandwidths.h2
        )
        self._differences = None
        self._design_weights = None
        self.degenerate_points = 0

    @property
    def differences(self):
        # differences[k, j] = regressor_k - regressor_j
        if self._differences is None:
            regressors = self.design.regressors
            self._differences = regressors[:, None] - regressors[None, :]
        return self._differences

    @property
    def design_weights(self):
        if self._design_weights is None:
            self._design_weights = (
                kernel_weight(self.differences, self.bandwidths.h1)
                * self.adjustment_weights
            )
        return self._design_weights

    def intervention_weights(self, x):
        return kernel_weight(self.design.regressors - x, self.bandwidths.h1)

    def _fallback(self, total):
        fallback = total < self.threshold
        self.degenerate_points += int(fallback.sum())
        return fallback, np.where(fallback, 1.0, total)

    def _ratio(self, numerator, total, targets):
        fallback, safe = self._fallback(total)
        values = numerator / safe.reshape(safe.shape + (1,) * (numerator.ndim - 1))
        if np.any(fallback):
            values[fallback] = targets.mean(axis=0)
        return values

    def constant_fit_at_design(self, targets):
        W = self.design_weights
        return self._ratio(W.T @ targets, W.sum(axis=0), targets)

    def linear_fit_at_design(self, targets):
        W = self.design_weights
        D = -self.differences  # regressor_k - x with x = regressor_j
        WD = W * D
        fallback, safe = self._fallback(W.sum(axis=0))
        alpha = _local_linear_alpha(
            safe,
            WD.sum(axis=0),
            (WD * D).sum(axis=0),
            W.T @ targets,
            WD.T @ targets,
            self.bandwidths.h1,
        )
        return np.where(fallback, targets.mean(), alpha)

    def constant_fit_at(self, x, targets):
        """
        Locally constant fit at (x, adjustment_j) for every design sample j;
        targets may hold several layers as columns.
        """
        K = self.intervention_weights(x)
        L = self.adjustment_weights
        weighted = K[:, None] * targets if targets.ndim == 2 else K * targets
        return self._ratio(L.T @ weighted, L.T @ K, targets)

    def linear_fit_at(self, x, targets):
        K = self.intervention_weights(x)
        d = self.design.regressors - x
        stats = self.adjustment_weights.T @ np.column_stack(
            [K, K * d, K * d * d, K * targets, K * d * targets]
        )
        fallback, safe = self._fallback(stats[:, 0])
        alpha = _local_linear_alpha(
            safe, stats[:, 1], stats[:, 2], stats[:, 3], stats[:, 4], self.bandwidths.h1
        )
        return np.where(fallback, targets.mean(), alpha)


class BoostedModel(object):
    """
    m_B = sum over layers of the kernel fit of that layer. Layer 1 is the
    response vector itself, every later layer holds the residuals of the
    model built from the layers before it.
    """

    def __init__(self, smoother, layers, fit_mode=LOCALLY_CONSTANT):
        self.smoother = smoother
        self.layers = [np.asarray(layer, dtype=float) for layer in layers]
        self.fit_mode = fit_mode

    @property
    def design(self):
        return self.smoother.design

    @property
    def bandwidths(self):
        return self.smoother.bandwidths

    @property
    def B(self):
        return len(self.layers)

    def _check_layer(self, b):
        if not 1 <= b <= self.B:
            raise IndexError("Layer {} out of range 1..{}".format(b, self.B))

    def layer_fit(self, b, x, xS):
        self._check_layer(b)
        if b == 1 and self.fit_mode == PARTIALLY_LOCALLY_LINEAR:
            fit = partially_locally_linear_fit
        else:
            fit = locally_constant_fit
        return fit(self.design, self.layers[b - 1], x, xS, self.bandwidths)

    def evaluate(self, x, xS):
        return sum(self.layer_fit(b, x, xS) for b in range(1, self.B + 1))

    def layer_marginals(self, x):
        """Marginal integral over the adjustment samples of every layer's fit at x."""
        smoother = self.smoother
        if self.fit_mode == PARTIALLY_LOCALLY_LINEAR:
            first = smoother.linear_fit_at(x, self.layers[0]).mean()
            if self.B == 1:
                return np.array([first])
            rest = smoother.constant_fit_at(x, np.column_stack(self.layers[1:]))
            return np.concatenate([[first], rest.mean(axis=0)])
        return smoother.constant_fit_at(x, np.column_stack(self.layers)).mean(axis=0)

    def marginal_effect(self, x):
        return float(self.layer_marginals(x).sum())


def stopping_metric(model, b, eval_points):
    """
    C(b): summed absolute marginal integral over the evaluation points of the
    fit to the residuals R_b of m_b, i.e. of layer b + 1.
    """
    if not 1 <= b < model.B:
        raise IndexError("Residual layer {} out of range 1..{}".format(b, model.B - 1))
    eval_points = np.asarray(eval_points, dtype=float).ravel()
    return float(sum(abs(model.layer_marginals(x)[b]) for x in eval_points))


def boost(design, bw, cfg, eval_points):
    """
    Initial kernel fit followed by up to B_max-1 L2-boosting steps of the
    locally constant smoother on the residuals.
    """
    eval_points = np.asarray(eval_points, dtype=float).ravel()
    if eval_points.size == 0:
        raise EmptyInputError("The stopping rule needs at least one evaluation point")

    smoother = KernelSmoother(design, bw)
    targets = design.responses
    layers = [targets]
    if cfg.fit_mode == PARTIALLY_LOCALLY_LINEAR:
        fitted = smoother.linear_fit_at_design(targets)
        current = np.array(
            [smoother.linear_fit_at(x, targets).mean() for x in eval_points]
        )
    else:
        fitted = smoother.constant_fit_at_design(targets)
        current = np.array(
            [smoother.constant_fit_at(x, targets).mean() for x in eval_points]
        )

    previous_metric = None
    for b in range(1, cfg.B_max):
        residuals = targets - fitted
        increment = np.array(
            [smoother.constant_fit_at(x, residuals).mean() for x in eval_points]
        )
        metric = float(np.abs(increment).sum())
        log.debug("Boosting step {}: C={:.6g}".format(b, metric))
        if metric == 0.0:
            log.debug("Boosting increment vanished, stopping after {} layers".format(b))
            break
        # m_{b+1} = m_b + g_{R_b} is kept even when C(b) ends the boosting
        layers.append(residuals)
        if cfg.stopping_enabled:
            if metric < cfg.stop_abs_frac * np.abs(current).sum():
                log.debug("Increment below absolute threshold, stopping")
                break
            ratio = None if previous_metric is None else metric / previous_metric
            if ratio is not None and ratio < cfg.stop_ratio:
                log.debug("Increment ratio below threshold, stopping")
                break
        fitted = fitted + smoother.constant_fit_at_design(residuals)
        current = current + increment
        previous_metric = metric

    log.debug("Boosted model uses {} layers".format(len(layers)))
    return BoostedModel(smoother, layers, cfg.fit_mode)


def estimate_effect(ts, query, p, bw=None, cfg=None, eval_points=None):
    """
    MINT-T: marginal integration of the boosted kernel fit over the empirical
    distribution of the adjustment set. With query.instantaneous the larger
    adjustment set including contemporaneous components is used.
    """
    design = lag_embed(ts, query, p)
    if bw is None:
        bw = rule_of_thumb_bandwidths(ts, query, p)
    if cfg is None:
        cfg = BoostConfig()
    if eval_points is None:
        eval_points = deciles(ts.column(query.c2))
    model = boost(design, bw, cfg, eval_points)
    effects = [model.marginal_effect(x) for x in query.intervention_values]
    if model.smoother.degenerate_points:
        log.warning(
            "Degenerate kernel weights at {} points, used the plain mean there".format(
                model.smoother.degenerate_points
            )
        )
    log.info(
        "Estimated effect of {}->{} at lag {} with {} layers".format(
            ts.names[query.c2], ts.names[query.c1], query.s, model.B
        )
    )
    return EffectCurve(query.intervention_values, effects, query, "mint-t")
