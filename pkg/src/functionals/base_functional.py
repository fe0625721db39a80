"""
Base interface for mass-constrained energy functionals.
"""

import math
from abc import ABC, abstractmethod
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from ..core.exceptions import DomainError
from ..core.grid import Field, integrate
from .energy import EnergyValue, dirichlet_integral


class BaseFunctional(ABC):
    """
    Abstract base class for energies minimized by the normalized gradient flow.

    A functional with m components exposes, for a tuple of m fields:
    - the energy split into kinetic and potential parts
    - the frozen potentials w_j with f_j(u) = w_j * u_j
    - the Euler-Lagrange residual norms for given multipliers
    """

    def __init__(self, name: str, dim: int, config: Optional[Dict[str, Any]] = None):
        """
        Initialize the functional.

        Args:
            name: Functional name used in logs and reports
            dim: Spatial dimension of the fields
            config: Extra parameters
        """
        self.name = name
        self.dim = dim
        self.config = config or {}
        self.evaluations = 0

    @property
    @abstractmethod
    def components(self) -> int:
        """Number of fields the functional acts on."""

    @abstractmethod
    def energy(self, fields: Sequence[Field]) -> EnergyValue:
        """Energy of a tuple of fields sharing one grid."""

    @abstractmethod
    def weights(self, fields: Sequence[Field]) -> List[np.ndarray]:
        """Frozen potentials w_j, one array per component."""

    @abstractmethod
    def residuals(self, fields: Sequence[Field], multipliers: Sequence[float]) -> List[float]:
        """Euler-Lagrange residual norm per component."""

    @abstractmethod
    def spec_dict(self) -> Dict[str, Any]:
        """Serializable description of the nonlinearity."""

    def check_fields(self, fields: Sequence[Field]) -> None:
        if len(fields) != self.components:
            raise DomainError(f"{self.name} expects {self.components} fields, got {len(fields)}")
        for u in fields:
            if u.ndim != self.dim:
                raise DomainError(f"{self.name} is {self.dim}D, got a {u.ndim}D field")

    def multipliers(self, fields: Sequence[Field], masses: Sequence[float]) -> List[float]:
        """
        Lagrange multipliers mu_j = (<f_j(u), u_j> - int |grad u_j|^2) / alpha_j.

        A component with zero mass gets multiplier 0.
        """
        result = []
        for u, w, mass in zip(fields, self.weights(fields), masses):
            if mass <= 0:
                result.append(0.0)
                continue
            work = integrate(u, w * u.values**2)
            result.append(math.fsum((work, -dirichlet_integral(u))) / mass)
        return result

    def width_hint(self, masses: Sequence[float]) -> float:
        """Inverse length scale b of the expected minimizer; the domain must exceed ~56/b."""
        positive = [m for m in masses if m > 0]
        return min(positive) / 4.0 if positive else 1.0

    def _record_evaluation(self) -> None:
        self.evaluations += 1

    def get_stats(self) -> Dict[str, Any]:
        """Get functional statistics."""
        return {
            "name": self.name,
            "dim": self.dim,
            "components": self.components,
            "evaluations": self.evaluations,
            "spec": self.spec_dict(),
        }

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}(name={self.name}, dim={self.dim})"
