"""Vacuum-fluctuation transfer from a quantized mode into a classical pulse on an LC line."""

from .errors import NumericalError, PreconditionError
from .model import (
    CircuitSpec,
    ConfigError,
    ExternalModeSpec,
    GaussianPulseSpec,
    Model,
    UnitsMode,
    load_config,
    validate,
)
from .quantum import LinearObservable, ModeState

__all__ = [
    "CircuitSpec",
    "ConfigError",
    "ExternalModeSpec",
    "GaussianPulseSpec",
    "LinearObservable",
    "Model",
    "ModeState",
    "NumericalError",
    "PreconditionError",
    "UnitsMode",
    "load_config",
    "validate",
]
__version__ = "0.1.0"
