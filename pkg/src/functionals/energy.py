"""
Discrete energies, Euler-Lagrange residuals and the coercivity constant.
"""

import math
from dataclasses import dataclass
from typing import Any, Dict, List, Tuple, Union

import numpy as np

from ..core.exceptions import DegenerateGridError, DomainError
from ..core.grid import (
    Field,
    fsum,
    gradient_seminorm,
    integrate,
    laplacian,
    quadrature_phi,
    require_same_grid,
)
from .nonlinearity import CoupledGSpec, NonlinearityKind, NonlinearitySpec

# C_L in  int u^4 <= C_L * mass * int |grad u|^2  on 2D grids.
GAGLIARDO_NIRENBERG_2D = 0.5


@dataclass(frozen=True)
class EnergyValue:
    """Energy split into kinetic and potential parts; total = kinetic - potential."""

    kinetic: float
    potential: float
    total: float

    @classmethod
    def from_parts(cls, kinetic: float, potential: float) -> "EnergyValue":
        return cls(kinetic=kinetic, potential=potential, total=kinetic - potential)

    def to_dict(self) -> Dict[str, float]:
        return {"kinetic": self.kinetic, "potential": self.potential, "total": self.total}


def dirichlet_integral(u: Field) -> float:
    """Integral of |grad u|^2 summed over all axes."""
    return math.fsum(gradient_seminorm(u, 2.0, axis) for axis in range(u.ndim))


def _check_dim(u: Field, dim: int) -> None:
    if u.ndim != dim:
        raise DomainError(f"nonlinearity is set up for dimension {dim}, field has {u.ndim}")


def scalar_energy(u: Field, spec: NonlinearitySpec) -> EnergyValue:
    """
    I[u] = 1/2 int |grad u|^2 - int F(u).

    Args:
        u: Sampled field
        spec: Scalar nonlinearity matching the field dimension

    Returns:
        EnergyValue with kinetic = 1/2 int |grad u|^2
    """
    _check_dim(u, spec.dim)
    return EnergyValue.from_parts(0.5 * dirichlet_integral(u), quadrature_phi(u, spec.potential))


def system_energy(u: Field, v: Field, spec: CoupledGSpec) -> EnergyValue:
    """J[u, v] = 1/2 int (|grad u|^2 + |grad v|^2) - int G(u^2, v^2)."""
    require_same_grid(u, v)
    _check_dim(u, spec.dim)
    kinetic = 0.5 * math.fsum((dirichlet_integral(u), dirichlet_integral(v)))
    potential = integrate(u, spec.G(u.values**2, v.values**2))
    return EnergyValue.from_parts(kinetic, potential)


def _interior(u: Field) -> Tuple[slice, ...]:
    if min(u.shape) < 4:
        raise DegenerateGridError(f"residual needs two interior cells per axis, got {u.shape}")
    return tuple(slice(1, -1) for _ in range(u.ndim))


def _interior_norm(u: Field, r: np.ndarray) -> float:
    return math.sqrt(u.measure * fsum(r[_interior(u)] ** 2))


def euler_lagrange_residual(u: Field, mu: float, spec: NonlinearitySpec) -> float:
    """L2 norm over interior cells of -Lap u + mu u - f(u)."""
    _check_dim(u, spec.dim)
    r = -laplacian(u) + mu * u.values - spec.derivative(u.values)
    return _interior_norm(u, r)


def system_el_residual(
    u: Field, v: Field, mu: float, nu: float, spec: CoupledGSpec
) -> Tuple[float, float]:
    """Residual norms of -Lap u + mu u - 2u g1(u^2, v^2) and its v counterpart."""
    require_same_grid(u, v)
    s1 = u.values**2
    s2 = v.values**2
    r_u = -laplacian(u) + mu * u.values - 2.0 * u.values * spec.g1(s1, s2)
    r_v = -laplacian(v) + nu * v.values - 2.0 * v.values * spec.g2(s1, s2)
    return _interior_norm(u, r_u), _interior_norm(v, r_v)


def _power_terms(spec: Union[NonlinearitySpec, CoupledGSpec]) -> List[List[Tuple[float, float]]]:
    """
    Upper bound of the potential density as sums c * s^q per component,
    with s the squared component.
    """
    if isinstance(spec, NonlinearitySpec):
        if spec.kind is not NonlinearityKind.POWER:
            raise DomainError("coercivity bound needs a power or polynomial nonlinearity")
        return [[(1.0 / (spec.p + 1.0), (spec.p + 1.0) / 2.0)]]

    terms: List[List[Tuple[float, float]]] = [[], []]
    if spec.a1 > 0:
        terms[0].append((spec.a1, spec.r1))
    if spec.a2 > 0:
        terms[1].append((spec.a2, spec.r2))
    if spec.beta > 0:
        # Young: s1^g1 s2^g2 <= (g1 s1^q + g2 s2^q) / q with q = g1 + g2
        q = spec.gamma1 + spec.gamma2
        terms[0].append((spec.beta * spec.gamma1 / q, q))
        terms[1].append((spec.beta * spec.gamma2 / q, q))
    return terms


def _interpolation_bound(q: float, mass: float, dim: int) -> Tuple[float, float]:
    """(A, theta) with int |u|^(2q) <= A * K^theta for mass <= `mass`."""
    if dim == 1:
        return mass ** ((q + 1.0) / 2.0), (q - 1.0) / 2.0
    return GAGLIARDO_NIRENBERG_2D ** (q - 1.0) * mass, q - 1.0


def coercivity_bound(spec: Union[NonlinearitySpec, CoupledGSpec], R: float) -> float:
    """
    Constant C(R) with  1/4 int |grad u|^2 (+ |grad v|^2) <= energy + C(R)
    for every field (pair) whose masses are at most R.

    Each power term c * int |u|^(2q) <= c A K^theta is absorbed into an equal
    share of K/4 by Young's inequality; the leftover constants add up to C(R).
    """
    if not (np.isfinite(R) and R > 0):
        raise DomainError(f"mass bound must be positive, got {R}")

    total = []
    for component in _power_terms(spec):
        if not component:
            continue
        eps = 0.25 / len(component)
        for c, q in component:
            A, theta = _interpolation_bound(q, R, spec.dim)
            if theta <= 0:
                total.append(c * A)
                continue
            k_star = (c * A * theta / eps) ** (1.0 / (1.0 - theta))
            total.append(eps * k_star * (1.0 - theta) / theta)
    return math.fsum(total)


def energy_breakdown(u: Field, spec: NonlinearitySpec) -> Dict[str, Any]:
    """Energy plus the mass, for CLI and report output."""
    value = scalar_energy(u, spec)
    data: Dict[str, Any] = value.to_dict()
    data["mass"] = integrate(u, u.values**2)
    return data
