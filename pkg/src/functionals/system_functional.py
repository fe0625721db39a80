"""
Two-component energy J[u, v] = 1/2 int (|grad u|^2 + |grad v|^2) - int G(u^2, v^2).
"""

from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from ..core.grid import Field
from .base_functional import BaseFunctional
from .energy import EnergyValue, system_el_residual, system_energy
from .nonlinearity import CoupledGSpec


class SystemFunctional(BaseFunctional):
    """
    Coupled functional driven by a CoupledGSpec.

    Frozen potentials are 2 g1(u^2, v^2) for u and 2 g2(u^2, v^2) for v.
    """

    def __init__(self, spec: CoupledGSpec, config: Optional[Dict[str, Any]] = None):
        name = "system-coupled" if spec.beta > 0 else "system-decoupled"
        super().__init__(name, spec.dim, config)
        self.spec = spec

    @property
    def components(self) -> int:
        return 2

    def energy(self, fields: Sequence[Field]) -> EnergyValue:
        self.check_fields(fields)
        self._record_evaluation()
        return system_energy(fields[0], fields[1], self.spec)

    def weights(self, fields: Sequence[Field]) -> List[np.ndarray]:
        s1 = fields[0].values ** 2
        s2 = fields[1].values ** 2
        return [2.0 * self.spec.g1(s1, s2), 2.0 * self.spec.g2(s1, s2)]

    def residuals(self, fields: Sequence[Field], multipliers: Sequence[float]) -> List[float]:
        u, v = fields
        r_u, r_v = system_el_residual(u, v, multipliers[0], multipliers[1], self.spec)
        return [r_u, r_v]

    def spec_dict(self) -> Dict[str, Any]:
        return self.spec.to_dict()
