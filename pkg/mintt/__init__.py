from .core import EffectCurve, Query, TimeSeries
from .estimator import BoostConfig, estimate_effect
from .kernels import Bandwidths, rule_of_thumb_bandwidths
from .models import get_builtin_model
from .reference import fit_additive_model, reference_effect
from .simulate import simulate, true_effect

__all__ = [
    "Bandwidths",
    "BoostConfig",
    "EffectCurve",
    "Query",
    "TimeSeries",
    "estimate_effect",
    "fit_additive_model",
    "get_builtin_model",
    "reference_effect",
    "rule_of_thumb_bandwidths",
    "simulate",
    "true_effect",
]
