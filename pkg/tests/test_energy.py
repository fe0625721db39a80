"""
Tests for energies, residuals and the coercivity constant.
"""

import math

import numpy as np
import pytest

from src.core.exceptions import DegenerateGridError, DomainError, GridMismatchError
from src.core.grid import Field1D, Grid1D, lp_norm
from src.functionals.energy import (
    coercivity_bound,
    dirichlet_integral,
    energy_breakdown,
    euler_lagrange_residual,
    scalar_energy,
    system_energy,
)
from src.functionals.nonlinearity import CoupledGSpec, NonlinearitySpec
from src.functionals.scalar_functional import ScalarFunctional
from src.functionals.system_functional import SystemFunctional

pytestmark = pytest.mark.unit


def soliton(b: float, h: float = 0.02, length: float = 80.0) -> Field1D:
    """Cubic ground state sqrt(2) b sech(b x), mass 4b."""
    grid = Grid1D.covering(length, h)
    return Field1D.from_function(grid, lambda x: math.sqrt(2.0) * b / np.cosh(b * x))


class TestScalarEnergy:
    def test_soliton_energy(self, cubic_spec):
        u = soliton(0.5)
        assert lp_norm(u, 2.0) == pytest.approx(2.0, rel=1e-4)
        assert scalar_energy(u, cubic_spec).total == pytest.approx(-(2.0**3) / 96, rel=1e-3)

    def test_soliton_residual_is_small(self, cubic_spec):
        b = 0.5
        assert euler_lagrange_residual(soliton(b), b * b, cubic_spec) < 1e-3

    def test_parts_add_up(self, gaussian_1d, cubic_spec):
        value = scalar_energy(gaussian_1d, cubic_spec)
        assert value.total == value.kinetic - value.potential
        assert value.kinetic == 0.5 * dirichlet_integral(gaussian_1d)

    def test_breakdown_reports_mass(self, gaussian_1d, cubic_spec):
        data = energy_breakdown(gaussian_1d, cubic_spec)
        assert data["mass"] == lp_norm(gaussian_1d, 2.0)
        assert set(data) == {"kinetic", "potential", "total", "mass"}

    def test_dimension_must_match(self, gaussian_2d, cubic_spec):
        with pytest.raises(DomainError):
            scalar_energy(gaussian_2d, cubic_spec)

    def test_residual_needs_interior(self, cubic_spec):
        u = Field1D(Grid1D.centered(3, 1.0), [0.0, 1.0, 0.0])
        with pytest.raises(DegenerateGridError):
            euler_lagrange_residual(u, 1.0, cubic_spec)


class TestSystemEnergy:
    def test_decoupled_is_sum_of_scalars(self, gaussian_1d, cubic_spec):
        v = gaussian_1d.with_values(0.5 * gaussian_1d.values)
        total = system_energy(gaussian_1d, v, CoupledGSpec.decoupled()).total
        expected = scalar_energy(gaussian_1d, cubic_spec).total + scalar_energy(v, cubic_spec).total
        assert total == pytest.approx(expected, rel=1e-13)

    def test_coupling_lowers_energy(self, gaussian_1d, manakov_spec):
        decoupled = system_energy(gaussian_1d, gaussian_1d, CoupledGSpec.decoupled()).total
        assert system_energy(gaussian_1d, gaussian_1d, manakov_spec).total < decoupled

    def test_grids_must_match(self, gaussian_1d, manakov_spec):
        other = Field1D.zeros(Grid1D.centered(10, 0.25))
        with pytest.raises(GridMismatchError):
            system_energy(gaussian_1d, other, manakov_spec)


class TestFunctionals:
    def test_multiplier_of_soliton(self, cubic_spec):
        b = 0.5
        u = soliton(b)
        functional = ScalarFunctional(cubic_spec)
        mu = functional.multipliers([u], [lp_norm(u, 2.0)])[0]
        assert mu == pytest.approx(b * b, rel=1e-3)

    def test_zero_mass_component_has_zero_multiplier(self, gaussian_1d, manakov_spec):
        functional = SystemFunctional(manakov_spec)
        zero = Field1D.zeros(gaussian_1d.grid)
        assert functional.multipliers([gaussian_1d, zero], [1.0, 0.0])[1] == 0.0

    def test_field_count_checked(self, gaussian_1d, manakov_spec):
        with pytest.raises(DomainError):
            SystemFunctional(manakov_spec).energy([gaussian_1d])

    def test_stats(self, gaussian_1d, cubic_spec):
        functional = ScalarFunctional(cubic_spec)
        functional.energy([gaussian_1d])
        stats = functional.get_stats()
        assert stats["evaluations"] == 1
        assert stats["spec"]["p"] == 3.0


class TestCoercivity:
    def test_bound_grows_with_mass(self, cubic_spec):
        assert 0 < coercivity_bound(cubic_spec, 1.0) < coercivity_bound(cubic_spec, 2.0)

    def test_bound_holds_for_soliton(self, cubic_spec):
        u = soliton(0.5)
        kinetic = dirichlet_integral(u)
        energy = scalar_energy(u, cubic_spec).total
        assert 0.25 * kinetic <= energy + coercivity_bound(cubic_spec, lp_norm(u, 2.0) * 1.01)

    def test_system_bound(self, manakov_spec):
        assert coercivity_bound(manakov_spec, 1.0) > coercivity_bound(
            CoupledGSpec.decoupled(), 1.0
        )

    def test_tabulated_not_supported(self):
        with pytest.raises(DomainError):
            coercivity_bound(NonlinearitySpec.zero(), 1.0)

    def test_mass_bound_positive(self, cubic_spec):
        with pytest.raises(DomainError):
            coercivity_bound(cubic_spec, 0.0)
