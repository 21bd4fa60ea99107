"""Gaussian EPR steering and its monogamy in a three-mode optomechanical system."""

from .linalg import CovarianceMatrix
from .model import NoiseConvention, PhysicalParams, derive_params, steady_state_cm
from .steering import (
    Partition,
    SteeringClass,
    classify,
    gaussian_steering,
    joint_exclusion_check,
    monogamy_report,
    steering_matrix,
)
from .sweep import SweepConfig, find_windows, run_sweep

__all__ = [
    "CovarianceMatrix", "NoiseConvention", "PhysicalParams", "derive_params",
    "steady_state_cm", "Partition", "SteeringClass", "classify", "gaussian_steering",
    "joint_exclusion_check", "monogamy_report", "steering_matrix", "SweepConfig",
    "find_windows", "run_sweep",
]
__version__ = "0.1.0"
