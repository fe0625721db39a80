"""
Scalar energy I[u] = 1/2 int |grad u|^2 - int F(u).
"""

from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from ..core.grid import Field
from .base_functional import BaseFunctional
from .energy import EnergyValue, euler_lagrange_residual, scalar_energy
from .nonlinearity import NonlinearitySpec


class ScalarFunctional(BaseFunctional):
    """Single-component functional driven by a NonlinearitySpec."""

    def __init__(self, spec: NonlinearitySpec, config: Optional[Dict[str, Any]] = None):
        super().__init__(f"scalar-{spec.kind.value}", spec.dim, config)
        self.spec = spec

    @property
    def components(self) -> int:
        return 1

    def energy(self, fields: Sequence[Field]) -> EnergyValue:
        self.check_fields(fields)
        self._record_evaluation()
        return scalar_energy(fields[0], self.spec)

    def weights(self, fields: Sequence[Field]) -> List[np.ndarray]:
        return [self.spec.weight(fields[0].values)]

    def residuals(self, fields: Sequence[Field], multipliers: Sequence[float]) -> List[float]:
        return [euler_lagrange_residual(fields[0], multipliers[0], self.spec)]

    def spec_dict(self) -> Dict[str, Any]:
        return self.spec.to_dict()
