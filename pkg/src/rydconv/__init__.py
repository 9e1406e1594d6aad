"""Simulation and analysis toolkit for a warm-vapour Rydberg microwave-to-optical converter."""

__version__ = "0.1.0"

from .config import ConfigError, ConverterConfig  # noqa: E402
from .core import (  # noqa: E402
    LEVEL_SCHEME,
    SingularLiouvillian,
    build_hamiltonian,
    build_jump_operators,
    eit_signal,
    signal_coherence,
    steady_state,
)
from .ensemble import BeamGrid, VelocityGrid, average_response, maxwell_weight  # noqa: E402

__all__ = [
    "ConfigError",
    "ConverterConfig",
    "LEVEL_SCHEME",
    "SingularLiouvillian",
    "build_hamiltonian",
    "build_jump_operators",
    "eit_signal",
    "signal_coherence",
    "steady_state",
    "BeamGrid",
    "VelocityGrid",
    "average_response",
    "maxwell_weight",
]
