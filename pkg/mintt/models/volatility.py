import numpy as np

from .sem_model import SemModel


class ArchModel(SemModel):
    model_id = 3
    description = "X_t = sigma_t eps_t, sigma_t^2 = 0.1 + 0.4 X_{t-1}^2 + 0.2 X_{t-4}^2"
    order = 4
    default_p = 4

    def __init__(self, omega=0.1, alphas=None, noise_scale=1.0):
        if alphas is None:
            alphas = {1: 0.4, 4: 0.2}
        self.omega = float(omega)
        self.alphas = np.zeros(max(alphas))
        for lag, alpha in alphas.items():
            self.alphas[lag - 1] = alpha
        self.order = self.alphas.size
        self.noise_scale = noise_scale

    def equation(self, c, lags, current, noise, state):
        sigma2 = self.omega + lags[:, :, 0] ** 2 @ self.alphas
        return np.sqrt(sigma2) * noise[:, 0]


class GarchModel(SemModel):
    model_id = 4
    description = (
        "X_t = sigma_t eps_t, sigma_t^2 = 0.2 + 0.6 X_{t-1}^2 + 0.3 sigma_{t-1}^2"
    )
    order = 1
    default_p = 10

    def __init__(self, omega=0.2, alpha=0.6, beta=0.3, noise_scale=np.sqrt(0.5)):
        self.omega = float(omega)
        self.alpha = float(alpha)
        self.beta = float(beta)
        self.noise_scale = noise_scale

    @property
    def initial_variance(self):
        return self.omega / (1.0 - self.alpha - self.beta)

    def initial_state(self, size):
        return {"sigma2": np.full(size, self.initial_variance)}

    def prepare_state(self, state, lags):
        state["sigma2"] = (
            self.omega + self.alpha * lags[:, 0, 0] ** 2 + self.beta * state["sigma2"]
        )

    def equation(self, c, lags, current, noise, state):
        return np.sqrt(state["sigma2"]) * noise[:, 0]
