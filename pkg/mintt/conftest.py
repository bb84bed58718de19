import faker
import mock
import numpy as np
import pytest

from .core import EffectCurve, Query, TimeSeries
from .models import LinearSem
from .simulate import simulate


@pytest.fixture
def fake():
    return faker.Faker()


@pytest.fixture
def patch_dict():
    def _patch_dict(orig, updates):
        for k, v in updates.items():
            if isinstance(orig.get(k), dict) and isinstance(v, dict):
                _patch_dict(orig[k], v)
            else:
                orig[k] = v
        return orig

    return _patch_dict


@pytest.fixture
def mockit():
    def _mockit(i, *args, **kwargs):
        return mock.patch(i.__module__ + "." + i.__name__, *args, **kwargs)

    return _mockit


@pytest.fixture
def make_series():
    def _make_series(n=60, l=2, seed=0, names=None):  # noqa: E741
        rng = np.random.default_rng(seed)
        return TimeSeries(rng.standard_normal((n, l)), names)

    return _make_series


@pytest.fixture
def ar1_series():
    def _ar1_series(phi=0.5, n=1000, seed=0):
        return simulate(LinearSem.autoregressive([phi]), n, seed)

    return _ar1_series


@pytest.fixture
def make_curve():
    def _make_curve(
        effects, c1=0, c2=0, s=1, xs=None, provenance="mint-t", transform="identity"
    ):
        effects = np.asarray(effects, dtype=float)
        if xs is None:
            xs = np.linspace(-1.0, 1.0, effects.size)
        query = Query(c1, c2, s, xs, transform)
        return EffectCurve(xs, effects, query, provenance)

    return _make_curve
