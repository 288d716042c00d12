"""Downlink simulator and min-max interference optimizer for user-centric
cell-free massive MIMO networks."""

from .errors import (
    ConfigurationError,
    DegenerateChannelError,
    EmptyLayoutError,
    ExperimentError,
    ModelBuildError,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigurationError",
    "DegenerateChannelError",
    "EmptyLayoutError",
    "ExperimentError",
    "ModelBuildError",
    "__version__",
]
