from .sem_model import SemModel, builtin_ids, get_builtin_model
from .linear import ArmaModel, LinearArModel, LinearSem
from .volatility import ArchModel, GarchModel
from .nonlinear import MultivariateModel, NonlinearArModel

__all__ = [
    "SemModel",
    "builtin_ids",
    "get_builtin_model",
    "LinearSem",
    "LinearArModel",
    "ArmaModel",
    "ArchModel",
    "GarchModel",
    "NonlinearArModel",
    "MultivariateModel",
]
