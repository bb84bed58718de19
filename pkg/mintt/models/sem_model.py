import logging

import numpy as np

from ..errors import UnknownModelError

log = logging.getLogger("mintt")


class SemModel(object):
    """
    A structural equation model for a stationary time series. Every component
    c is generated as X_{c,t} = f_c(lags, contemporaneous parents, noise,
    state), where lags[:, j-1, :] holds X_{t-j} for j = 1..order.

    Subclasses that set `model_id` are available through get_builtin_model.
    """

    model_id = None
    description = None
    names = ["X1"]
    order = 1
    default_p = None
    noise_scale = 1.0

    @property
    def l(self):  # noqa: E743
        return len(self.names)

    def causal_order(self):
        """Order in which the components of one time step are generated."""
        return list(range(self.l))

    def initial_state(self, size):
        return {}

    def draw_noise(self, rng, size):
        return rng.standard_normal((size, self.l)) * np.asarray(
            self.noise_scale, dtype=float
        )

    def prepare_state(self, state, lags):
        """Advances auxiliary state to the current time step before generation."""

    def equation(self, c, lags, current, noise, state):
        raise NotImplementedError

    def finish_state(self, state, current, noise):
        """Records whatever the next step needs from the values just generated."""

    def as_dict(self):
        return {
            "model_id": self.model_id,
            "description": self.description,
            "names": list(self.names),
            "order": self.order,
        }

    def __repr__(self):
        return "{}(l={}, order={})".format(self.__class__.__name__, self.l, self.order)


def _all_subclasses(cls):
    for subclass in cls.__subclasses__():
        yield subclass
        yield from _all_subclasses(subclass)


def builtin_ids():
    return sorted(
        cls.model_id for cls in _all_subclasses(SemModel) if cls.model_id is not None
    )


def get_builtin_model(model_id, **kwargs):
    try:
        model_id = int(model_id)
    except (TypeError, ValueError):
        raise UnknownModelError(
            "Model id must be an integer, got '{}'".format(model_id)
        )
    for model in _all_subclasses(SemModel):
        if model.model_id == model_id:
            log.debug("Using builtin model: {}".format(model.__name__))
            return model(**kwargs)
    raise UnknownModelError(
        "No builtin model with id {} (known: {})".format(model_id, builtin_ids())
    )
