import numpy as np

from .sem_model import SemModel


class NonlinearArModel(SemModel):
    model_id = 2
    description = (
        "X_t = cos(X_{t-1} + X_{t-4}) + log(|X_{t-6} - X_{t-10}| + 1) + eps_t"
    )
    order = 10
    default_p = 10

    def __init__(self, noise_scale=1.0):
        self.noise_scale = noise_scale

    def equation(self, c, lags, current, noise, state):
        x = lags[:, :, 0]
        return (
            np.cos(x[:, 0] + x[:, 3])
            + np.log(np.abs(x[:, 5] - x[:, 9]) + 1.0)
            + noise[:, 0]
        )


class MultivariateModel(SemModel):
    model_id = 6
    description = (
        "X1_t = 0.4 X1_{t-1} - 0.2 X1_{t-2} + 0.3 X2_{t-3} + eps1_t; "
        "X2_t = cos(X1_{t-1}) + log(|X2_{t-2}| + 1) + eps2_t; "
        "X3_t = sin(X3_{t-1} - X2_{t-1}) + sqrt(|X2_{t-3} + X4_{t-1}|) + eps3_t; "
        "X4_t = cos(X2_{t-1} - X3_{t-4}) + log(|X1_{t-6} + X2_{t-10}| + 1) + eps4_t"
    )
    names = ["X1", "X2", "X3", "X4"]
    order = 10
    default_p = 10

    def __init__(self, noise_scale=1.0):
        self.noise_scale = noise_scale

    def equation(self, c, lags, current, noise, state):
        # lag j of component k lives at lags[:, j - 1, k]
        x1, x2, x3, x4 = (lags[:, :, k] for k in range(4))
        if c == 0:
            value = 0.4 * x1[:, 0] - 0.2 * x1[:, 1] + 0.3 * x2[:, 2]
        elif c == 1:
            value = np.cos(x1[:, 0]) + np.log(np.abs(x2[:, 1]) + 1.0)
        elif c == 2:
            value = np.sin(x3[:, 0] - x2[:, 0]) + np.sqrt(np.abs(x2[:, 2] + x4[:, 0]))
        else:
            value = np.cos(x2[:, 0] - x3[:, 3]) + np.log(
                np.abs(x1[:, 5] + x2[:, 9]) + 1.0
            )
        return value + noise[:, c]
