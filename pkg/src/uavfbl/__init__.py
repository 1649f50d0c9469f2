"""Resource allocation for a UAV co-served with a ground user in short-packet downlinks.

The package models an access point that serves a ground user (GU) and a UAV
either by NOMA with successive interference cancellation at the UAV, or by
decode-and-forward relaying through the UAV. Both are optimized in the
infinite-blocklength (Shannon) regime and in the finite-blocklength regime
given by the normal approximation.
"""

from .channel import LinkBudget, PathLossParams, Position3D, build_link_budget
from .config import ConfigError, ScenarioConfig, load_config, parse_config
from .fbl import (
    DomainError,
    InfeasibleRateError,
    fbl_error,
    fbl_rate,
    inv_q,
    invert_snr_for_error,
    q_function,
    shannon_capacity,
)
from .montecarlo import FadingSpec, MonteCarloReport, run_campaign
from .schemes import Allocation, ReliabilityTargets, ThroughputPair
from .solvers import AllocationResult, grid_oracle, max_feasible_beta, solve

__all__ = [
    "Allocation", "AllocationResult", "ConfigError", "DomainError", "FadingSpec",
    "InfeasibleRateError", "LinkBudget", "MonteCarloReport", "PathLossParams", "Position3D",
    "ReliabilityTargets", "ScenarioConfig", "ThroughputPair", "build_link_budget",
    "fbl_error", "fbl_rate", "grid_oracle", "inv_q", "invert_snr_for_error",
    "load_config", "max_feasible_beta", "parse_config", "q_function", "run_campaign",
    "shannon_capacity", "solve",
]

__version__ = "0.1.0"
