import numpy as np

from .sem_model import SemModel


class LinearSem(SemModel):
    """
    Structural vector autoregression
        X_t = sum_j A_j X_{t-j} + A_0 X_t + eps_t
    where A_0 encodes instantaneous effects and must describe an acyclic graph.
    `coefficients` maps each lag j to an l x l matrix whose entry [c, d] is
    the effect of X_{d,t-j} on X_{c,t}.
    """

    def __init__(self, coefficients, instantaneous=None, noise_scale=1.0, names=None):
        matrices = {
            int(lag): np.atleast_2d(np.asarray(matrix, dtype=float))
            for lag, matrix in dict(coefficients).items()
        }
        if not matrices:
            raise ValueError("A linear SEM needs at least one lag coefficient")
        if min(matrices) < 1:
            raise ValueError("Lag coefficients must use lags >= 1")
        l = next(iter(matrices.values())).shape[0]  # noqa: E741
        if names is None:
            names = ["X{}".format(c + 1) for c in range(l)]
        self.names = list(names)
        self.order = max(matrices)
        self.coefficients = np.zeros((self.order, l, l))
        for lag, matrix in matrices.items():
            if matrix.shape != (l, l):
                raise ValueError(
                    "Lag {} coefficients have shape {}, expected {}".format(
                        lag, matrix.shape, (l, l)
                    )
                )
            self.coefficients[lag - 1] = matrix
        if instantaneous is None:
            instantaneous = np.zeros((l, l))
        self.instantaneous = np.atleast_2d(np.asarray(instantaneous, dtype=float))
        if self.instantaneous.shape != (l, l):
            raise ValueError("Instantaneous effects must be an l x l matrix")
        if np.any(np.diag(self.instantaneous) != 0):
            raise ValueError("A component cannot instantaneously cause itself")
        self.noise_scale = noise_scale
        self._order = self._topological_order()

    @classmethod
    def autoregressive(cls, phis, noise_scale=1.0):
        """Univariate AR(P) with X_t = sum_j phis[j-1] X_{t-j} + eps_t."""
        return cls(
            {j + 1: [[phi]] for j, phi in enumerate(phis)}, noise_scale=noise_scale
        )

    @classmethod
    def white_noise(cls, l=1, noise_scale=1.0):  # noqa: E741
        return cls({1: np.zeros((l, l))}, noise_scale=noise_scale)

    @property
    def ar_coefficients(self):
        """phi_1..phi_order of a univariate model."""
        if self.l != 1:
            raise ValueError("AR coefficients are only defined for univariate models")
        return self.coefficients[:, 0, 0].copy()

    def _topological_order(self):
        parents = {c: set(np.flatnonzero(self.instantaneous[c])) for c in range(self.l)}
        order = []
        while parents:
            ready = sorted(c for c, pa in parents.items() if not pa - set(order))
            if not ready:
                raise ValueError(
                    "Instantaneous effects form a cycle among {}".format(
                        sorted(parents)
                    )
                )
            for c in ready:
                order.append(c)
                del parents[c]
        return order

    def causal_order(self):
        return list(self._order)

    def equation(self, c, lags, current, noise, state):
        lagged = np.einsum("sjk,jk->s", lags, self.coefficients[:, c, :])
        return lagged + current @ self.instantaneous[c] + noise[:, c]


class LinearArModel(LinearSem):
    model_id = 1
    description = "X_t = 0.4 X_{t-2} - 0.6 X_{t-6} + 0.3 X_{t-10} + eps_t"
    default_p = 10

    def __init__(self, coefficients=None, noise_scale=1.0):
        if coefficients is None:
            coefficients = {2: 0.4, 6: -0.6, 10: 0.3}
        phis = np.zeros(max(coefficients))
        for lag, phi in coefficients.items():
            phis[lag - 1] = phi
        super().__init__(
            {j + 1: [[phi]] for j, phi in enumerate(phis)}, noise_scale=noise_scale
        )


class ArmaModel(SemModel):
    """ARMA(3,1) whose moving-average term remembers the previous noise draw."""

    model_id = 5
    description = (
        "X_t = 0.4 X_{t-1} - 0.2 X_{t-2} + 0.3 X_{t-3} + 0.8 eps_{t-1} + eps_t"
    )
    order = 3
    default_p = 10

    def __init__(self, ar=(0.4, -0.2, 0.3), ma=0.8, noise_scale=np.sqrt(0.5)):
        self.ar = np.asarray(ar, dtype=float)
        self.ma = float(ma)
        self.order = self.ar.size
        self.noise_scale = noise_scale

    def initial_state(self, size):
        return {"previous_noise": np.zeros(size)}

    def equation(self, c, lags, current, noise, state):
        return (
            lags[:, :, 0] @ self.ar + self.ma * state["previous_noise"] + noise[:, 0]
        )

    def finish_state(self, state, current, noise):
        # the MA memory tracks the noise, not X, so interventions leave it alone
        state["previous_noise"] = noise[:, 0].copy()
