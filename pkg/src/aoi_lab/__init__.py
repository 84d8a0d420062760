"""aoi-lab: average age-of-information for broadcast and unicast downlinks."""

from .analytic import (
    DivergentAoiError,
    RenewalDiagnostics,
    Strategy,
    SystemConfig,
    aoi,
    system_average,
)
from .dynamic import DynamicConfig, expected_aoi_monte_carlo
from .fbl import LinkBudget, block_error_rate, exp_integral_ei, harmonic_capacity
from .selector import (
    RemoteControlScenario,
    ThresholdResult,
    alpha_threshold,
    alpha_threshold_limits,
    beta_threshold,
)
from .sim import AoiEstimate, SimRun, simulate

__version__ = "0.1.0"

__all__ = [
    "AoiEstimate",
    "DivergentAoiError",
    "DynamicConfig",
    "LinkBudget",
    "RemoteControlScenario",
    "RenewalDiagnostics",
    "SimRun",
    "Strategy",
    "SystemConfig",
    "ThresholdResult",
    "alpha_threshold",
    "alpha_threshold_limits",
    "aoi",
    "beta_threshold",
    "block_error_rate",
    "exp_integral_ei",
    "expected_aoi_monte_carlo",
    "harmonic_capacity",
    "simulate",
    "system_average",
]
