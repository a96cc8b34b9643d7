"""Evolving hyperplane-fuzzy controller, MAV plant surrogates and benchmark harness."""

from .controller import (
    ControllerConfig,
    ControllerFault,
    ParsimoniousController,
    PMatrix,
    SlidingState,
    lyapunov_p_matrix,
    p_matrix,
)
from .palm import DIM, N_INPUTS, FiringVector, HyperplaneRule, PalmNetwork, extended_input, network_output
from .pid import PidConfig, PidController

__all__ = [
    "ControllerConfig",
    "ControllerFault",
    "ParsimoniousController",
    "PMatrix",
    "SlidingState",
    "lyapunov_p_matrix",
    "p_matrix",
    "DIM",
    "N_INPUTS",
    "FiringVector",
    "HyperplaneRule",
    "PalmNetwork",
    "extended_input",
    "network_output",
    "PidConfig",
    "PidController",
]

__version__ = "0.1.0"
