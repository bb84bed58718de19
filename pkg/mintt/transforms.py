import logging

import numpy as np

from .errors import UnknownTransformError

log = logging.getLogger("mintt")


class Transform(object):
    """
    A real-valued response transformation g, applied to X_{c1,t} before
    estimation so that E[g(X_{c1,t}) | do(X_{c2,t-s}=x)] is targeted.
    """

    names = None

    def __call__(self, values):
        return self.apply(np.asarray(values, dtype=float))

    def apply(self, values):
        raise NotImplementedError

    @property
    def name(self):
        return self.names[0]

    def as_dict(self):
        return {"name": self.name}

    def __eq__(self, other):
        return type(self) is type(other) and self.as_dict() == other.as_dict()

    def __hash__(self):
        return hash(tuple(sorted(self.as_dict().items())))

    def __repr__(self):
        return "{}()".format(self.__class__.__name__)


class IdentityTransform(Transform):
    names = ["identity", "id"]

    def apply(self, values):
        return values


class SquareTransform(Transform):
    names = ["square", "squared"]

    def apply(self, values):
        return values**2


class AbsoluteTransform(Transform):
    names = ["abs", "absolute"]

    def apply(self, values):
        return np.abs(values)


class IndicatorTransform(Transform):
    """g(x) = 1{x <= threshold}; targets interventional probabilities."""

    names = ["indicator"]

    def __init__(self, threshold=0.0):
        self.threshold = float(threshold)

    def apply(self, values):
        return (values <= self.threshold).astype(float)

    def as_dict(self):
        return {"name": self.name, "threshold": self.threshold}

    def __repr__(self):
        return "IndicatorTransform(threshold={!r})".format(self.threshold)


class CustomTransform(Transform):
    names = ["custom"]

    def __init__(self, func, label="custom"):
        self.func = func
        self.label = label

    def apply(self, values):
        return np.asarray(self.func(values), dtype=float)

    def as_dict(self):
        return {"name": self.name, "label": self.label}

    def __eq__(self, other):
        return isinstance(other, CustomTransform) and self.func is other.func

    def __hash__(self):
        return hash(("custom", id(self.func)))


def get_transform(name, **kwargs):
    if isinstance(name, Transform):
        return name
    if callable(name):
        return CustomTransform(name, label=getattr(name, "__name__", "custom"))
    for transform in Transform.__subclasses__():
        if transform is CustomTransform:
            continue
        if str(name).lower() in transform.names:
            log.debug("Using transform: {}".format(transform.__name__))
            return transform(**kwargs)
    raise UnknownTransformError("No transform found named '{}'".format(name))
