"""
Energy functionals: nonlinearity families, energies and residuals.
"""

from .base_functional import BaseFunctional
from .energy import (
    EnergyValue,
    coercivity_bound,
    euler_lagrange_residual,
    scalar_energy,
    system_el_residual,
    system_energy,
)
from .nonlinearity import CoupledGSpec, NonlinearityKind, NonlinearitySpec
from .scalar_functional import ScalarFunctional
from .spec_files import load_spec
from .system_functional import SystemFunctional

__all__ = [
    "BaseFunctional",
    "EnergyValue",
    "coercivity_bound",
    "euler_lagrange_residual",
    "scalar_energy",
    "system_el_residual",
    "system_energy",
    "CoupledGSpec",
    "NonlinearityKind",
    "NonlinearitySpec",
    "ScalarFunctional",
    "SystemFunctional",
    "load_spec",
]
