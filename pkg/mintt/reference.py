import logging

import numpy as np

from .core import empirical_sd
from .errors import DegenerateSeriesError, SeriesTooShortError
from .kernels import kernel_weight
from .models import SemModel
from .simulate import interventional_effect

log = logging.getLogger("mintt")

GRID_SIZE = 201
BANDWIDTH_FACTOR = 0.5
TOLERANCE = 1e-4
MAX_SWEEPS = 50
# Floor for the scale of a smooth term when measuring its relative change.
SCALE_FLOOR = 1e-10


def local_linear_matrix(samples, grid, h):
    """
    Rows hold the equivalent kernel of the local-linear smoother at every
    grid point: fitted = matrix @ targets.
    """
    d = samples[None, :] - grid[:, None]
    w = kernel_weight(d, h)
    S0 = w.sum(axis=1, keepdims=True)
    S1 = (w * d).sum(axis=1, keepdims=True)
    S2 = (w * d * d).sum(axis=1, keepdims=True)
    det = S0 * S2 - S1**2
    flat = det <= 1e-12 * S0**2 * h**2
    linear = w * (S2 - d * S1) / np.where(flat, 1.0, det)
    constant = w / np.where(S0 > 0, S0, 1.0)
    return np.where(flat, constant, linear)


class AdditiveModel(object):
    """
    X_{c,t} = mu_c + sum_{c', j} f_{c, c', j}(X_{c', t-j}) + eps_{c,t}, each
    smooth term stored by its values on a uniform grid over the fitting range
    of its regressor and evaluated by linear interpolation.
    """

    def __init__(self, names, p, intercepts, grids, values, residuals, sweeps):
        self.names = list(names)
        self.p = int(p)
        self.intercepts = np.asarray(intercepts, dtype=float)
        self.grids = np.asarray(grids, dtype=float)
        self.values = np.asarray(values, dtype=float)
        self.residuals = np.asarray(residuals, dtype=float)
        self.sweeps = list(sweeps)

    @property
    def l(self):  # noqa: E743
        return len(self.names)

    @property
    def terms(self):
        return [(c, j) for c in range(self.l) for j in range(1, self.p + 1)]

    def term_index(self, component, lag):
        return component * self.p + (lag - 1)

    def smooth_term(self, target, component, lag, x):
        k = self.term_index(component, lag)
        return np.interp(x, self.grids[k], self.values[target, k])

    def predict(self, target, lags):
        """Fitted conditional mean of `target` given lags[:, j-1, c] = X_{c, t-j}."""
        prediction = np.full(lags.shape[0], self.intercepts[target])
        for k, (c, j) in enumerate(self.terms):
            prediction += np.interp(
                lags[:, j - 1, c], self.grids[k], self.values[target, k]
            )
        return prediction

    def as_sem(self, gaussian=False):
        return AdditiveSem(self, gaussian=gaussian)

    def __repr__(self):
        return "AdditiveModel(l={}, p={})".format(self.l, self.p)


class AdditiveSem(SemModel):
    """
    A fitted additive model used as a structural equation model. Noise is
    drawn by resampling whole residual rows, or from a centered Gaussian with
    the residual standard deviations when `gaussian` is set.
    """

    def __init__(self, model, gaussian=False):
        self.model = model
        self.names = model.names
        self.order = model.p
        self.gaussian = gaussian
        self.noise_scale = model.residuals.std(axis=0, ddof=1)

    def draw_noise(self, rng, size):
        if self.gaussian:
            return rng.standard_normal((size, self.l)) * self.noise_scale
        rows = rng.integers(0, self.model.residuals.shape[0], size)
        return self.model.residuals[rows]

    def equation(self, c, lags, current, noise, state):
        return self.model.predict(c, lags) + noise[:, c]


def _backfit(response, regressors, smoothers, grids):
    """Backfitting of one target; returns intercept, grid values and sweeps used."""
    intercept = response.mean()
    T = regressors.shape[1]
    values = np.zeros((T, grids.shape[1]))
    fitted = np.zeros_like(regressors)
    for sweep in range(1, MAX_SWEEPS + 1):
        change = 0.0
        for k in range(T):
            partial = response - intercept - fitted.sum(axis=1) + fitted[:, k]
            grid_values = smoothers[k] @ partial
            sample_values = np.interp(regressors[:, k], grids[k], grid_values)
            center = sample_values.mean()
            grid_values -= center
            sample_values -= center
            scale = max(np.max(np.abs(fitted[:, k])), SCALE_FLOOR)
            change = max(change, np.max(np.abs(sample_values - fitted[:, k])) / scale)
            values[k] = grid_values
            fitted[:, k] = sample_values
        if change < TOLERANCE:
            return intercept, values, fitted, sweep, True
    return intercept, values, fitted, MAX_SWEEPS, False


def fit_additive_model(ts, p):
    """
    Fits one additive autoregression per component by backfitting local-linear
    smoothers of every (component, lag) term.
    """
    p = int(p)
    if p < 1:
        raise ValueError("Lag order p must be a positive integer, got {}".format(p))
    n, l = ts.n, ts.l  # noqa: E741
    if n <= p + 10 * l * p:
        raise SeriesTooShortError(
            "Additive model with p={} and {} components needs more than {} "
            "observations, got {}".format(p, l, p + 10 * l * p, n)
        )
    values = ts.values
    rows = np.arange(p, n)
    terms = [(c, j) for c in range(l) for j in range(1, p + 1)]
    regressors = np.column_stack([values[rows - j, c] for c, j in terms])

    sds = [empirical_sd(ts, c) for c in range(l)]
    grids = np.empty((len(terms), GRID_SIZE))
    smoothers = []
    for k, (c, j) in enumerate(terms):
        low, high = regressors[:, k].min(), regressors[:, k].max()
        if sds[c] <= 0 or high <= low:
            raise DegenerateSeriesError(
                "Cannot smooth over constant component '{}'".format(ts.names[c])
            )
        grids[k] = np.linspace(low, high, GRID_SIZE)
        smoothers.append(
            local_linear_matrix(regressors[:, k], grids[k], BANDWIDTH_FACTOR * sds[c])
        )

    intercepts = np.empty(l)
    term_values = np.empty((l, len(terms), GRID_SIZE))
    residuals = np.empty((rows.size, l))
    sweeps = []
    for target in range(l):
        response = values[rows, target]
        intercept, grid_values, fitted, used, converged = _backfit(
            response, regressors, smoothers, grids
        )
        if not converged:
            log.warning(
                "Backfitting for '{}' did not converge in {} sweeps, using the "
                "last iterate".format(ts.names[target], MAX_SWEEPS)
            )
        log.debug("Backfitting for '{}' took {} sweeps".format(ts.names[target], used))
        intercepts[target] = intercept
        term_values[target] = grid_values
        residuals[:, target] = response - intercept - fitted.sum(axis=1)
        sweeps.append(used)

    residuals -= residuals.mean(axis=0)
    return AdditiveModel(ts.names, p, intercepts, grids, term_values, residuals, sweeps)


def reference_effect(model, query, N=1000, horizon=None, seed=0, gaussian=False):
    """
    Effect curve by interventional simulation from a fitted additive model,
    or from any SemModel handed in directly.
    """
    sem = model.as_sem(gaussian=gaussian) if isinstance(model, AdditiveModel) else model
    return interventional_effect(sem, query, N, horizon, seed, "reference")


def reference_estimate(ts, query, p, N=1000, horizon=None, seed=0, gaussian=False):
    model = fit_additive_model(ts, p)
    return reference_effect(model, query, N, horizon, seed, gaussian)
