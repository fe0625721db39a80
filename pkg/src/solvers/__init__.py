"""
Solvers: normalized gradient flow and energy-curve sweeps.
"""

from .gradient_flow import (
    ConstraintSpec,
    FlowConfig,
    FlowDiagnosis,
    FlowScheme,
    InitialState,
    MinimizeResult,
    NormalizedGradientFlow,
    minimize_scalar,
    minimize_system,
)
from .sweep import continuity_probe, energy_curve_sweep

__all__ = [
    "ConstraintSpec",
    "FlowConfig",
    "FlowDiagnosis",
    "FlowScheme",
    "InitialState",
    "MinimizeResult",
    "NormalizedGradientFlow",
    "minimize_scalar",
    "minimize_system",
    "energy_curve_sweep",
    "continuity_probe",
]
