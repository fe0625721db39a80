"""
Tests for the normalized gradient flow.
"""

import math

import numpy as np
import pytest

from src.core.exceptions import DegenerateConstraintError, DivergenceError, DomainError
from src.core.grid import Field1D, Grid1D, Grid2D, lp_norm
from src.functionals.nonlinearity import CoupledGSpec, NonlinearitySpec
from src.functionals.system_functional import SystemFunctional
from src.solvers.gradient_flow import (
    DECAY_LENGTHS,
    ConstraintSpec,
    FlowConfig,
    FlowDiagnosis,
    FlowScheme,
    NormalizedGradientFlow,
    InitialState,
    auto_sized_grid,
    boundary_mass,
    minimize_scalar,
    minimize_system,
)

pytestmark = pytest.mark.unit


class TestConfig:
    def test_constraint_validation(self):
        with pytest.raises(DomainError):
            ConstraintSpec(-1.0)
        with pytest.raises(DegenerateConstraintError):
            ConstraintSpec(0.0).require_scalar()
        with pytest.raises(DegenerateConstraintError):
            ConstraintSpec(0.0, 0.0).require_system()
        ConstraintSpec(0.0, 1.0).require_system()

    def test_flow_config_validation(self):
        with pytest.raises(DomainError):
            FlowConfig(tau=0.0)
        with pytest.raises(DomainError):
            FlowConfig(theta=1.5)
        with pytest.raises(DomainError):
            FlowConfig(init="given-file")

    def test_from_dict_accepts_strings(self):
        cfg = FlowConfig.from_dict({"scheme": "explicit", "init": "random-seeded", "bogus": 1})
        assert cfg.scheme is FlowScheme.EXPLICIT
        assert cfg.init is InitialState.RANDOM
        assert FlowConfig.from_dict(cfg.to_dict()) == cfg

    def test_explicit_stability_limit(self):
        grid = Grid1D.centered(100, 0.1)
        assert FlowConfig.stability_limit(grid) == pytest.approx(0.005)
        assert FlowConfig.stability_limit(Grid2D.centered(4, 4, 0.1, 0.1)) == pytest.approx(0.0025)
        with pytest.raises(DomainError):
            minimize_scalar(
                NonlinearitySpec.power(3.0),
                ConstraintSpec(1.0),
                grid,
                FlowConfig(scheme="explicit", tau=0.01),
            )


class TestAutoSizing:
    def test_short_grid_is_enlarged_with_parity(self):
        grid = Grid1D.centered(11, 0.1)
        sized = auto_sized_grid(grid, 0.5, FlowConfig())
        assert sized.length >= DECAY_LENGTHS / 0.5
        assert sized.n % 2 == 1
        assert sized.h == grid.h

    def test_2d_and_disabled_are_untouched(self):
        grid2 = Grid2D.centered(8, 8, 0.5, 0.5)
        assert auto_sized_grid(grid2, 0.5, FlowConfig()) is grid2
        grid1 = Grid1D.centered(10, 0.1)
        assert auto_sized_grid(grid1, 0.5, FlowConfig(auto_domain=False)) is grid1

    def test_boundary_mass(self):
        u = Field1D(Grid1D.centered(40, 0.5), np.r_[1.0, np.zeros(39)])
        assert boundary_mass(u) == 0.5


class TestScalarMinimization:
    def test_cubic_ground_state_energy(self, cubic_spec):
        alpha = 2.0
        result = minimize_scalar(cubic_spec, ConstraintSpec(alpha), Grid1D.covering(30, 0.05))
        assert result.energy.total == pytest.approx(-(alpha**3) / 96, rel=1e-2)
        assert lp_norm(result.field, 2.0) == pytest.approx(alpha, rel=1e-12)
        assert result.multiplier > 0
        assert result.diagnosis is not FlowDiagnosis.SPREADING

    def test_minimizer_is_symmetric_decreasing(self, cubic_spec):
        result = minimize_scalar(cubic_spec, ConstraintSpec(1.0), Grid1D.covering(30, 0.1))
        values = result.field.values
        peak = int(np.argmax(values))
        assert np.all(np.diff(values[: peak + 1]) >= -1e-12)
        assert np.all(np.diff(values[peak:]) <= 1e-12)
        np.testing.assert_allclose(values, values[::-1], atol=1e-8)

    def test_iteration_cap(self, cubic_spec):
        cfg = FlowConfig(max_iter=3)
        result = minimize_scalar(cubic_spec, ConstraintSpec(1.0), Grid1D.covering(30, 0.1), cfg)
        assert not result.converged
        assert result.iterations == 3
        assert len(result.energy_history) == 4
        assert result.energy_evaluations >= len(result.energy_history)
        assert result.to_dict()["energy_evaluations"] == result.energy_evaluations

    def test_zero_nonlinearity_spreads(self):
        cfg = FlowConfig(max_iter=200, max_domain_doublings=0)
        result = minimize_scalar(
            NonlinearitySpec.zero(), ConstraintSpec(1.0), Grid1D.covering(20, 0.1), cfg
        )
        assert result.diagnosis is FlowDiagnosis.SPREADING
        assert not result.converged

    def test_random_start_is_seeded(self, cubic_spec):
        cfg = FlowConfig(init="random-seeded", seed=3, max_iter=5)
        grid = Grid1D.covering(30, 0.1)
        a = minimize_scalar(cubic_spec, ConstraintSpec(1.0), grid, cfg)
        b = minimize_scalar(cubic_spec, ConstraintSpec(1.0), grid, cfg)
        np.testing.assert_array_equal(a.field.values, b.field.values)

    def test_given_start_is_interpolated(self, cubic_spec):
        coarse = Field1D.from_function(Grid1D.covering(30, 0.2), lambda x: np.exp(-(x**2)))
        cfg = FlowConfig(init="given-file", initial_fields=(coarse,), max_iter=2)
        result = minimize_scalar(cubic_spec, ConstraintSpec(1.0), Grid1D.covering(30, 0.1), cfg)
        assert result.field.grid.h == 0.1

    def test_explicit_scheme_descends(self, cubic_spec):
        cfg = FlowConfig(scheme="explicit", max_iter=200)
        result = minimize_scalar(cubic_spec, ConstraintSpec(2.0), Grid1D.covering(30, 0.1), cfg)
        history = result.energy_history
        assert history[-1] < history[0]


class TestSystemMinimization:
    def test_zero_mass_component_stays_zero(self, manakov_spec):
        grid = Grid1D.covering(30, 0.1)
        result = minimize_system(manakov_spec, ConstraintSpec(2.0, 0.0), grid)
        assert np.all(result.fields[1].values == 0)
        assert result.multipliers[1] == 0.0

    @pytest.mark.slow
    def test_single_component_matches_scalar(self, manakov_spec, cubic_spec):
        grid = Grid1D.covering(30, 0.1)
        system = minimize_system(manakov_spec, ConstraintSpec(2.0, 0.0), grid)
        scalar = minimize_scalar(cubic_spec, ConstraintSpec(2.0), grid)
        assert system.energy.total == pytest.approx(scalar.energy.total, rel=1e-8)

    @pytest.mark.slow
    def test_coupling_beats_decoupled_sum(self, manakov_spec):
        grid = Grid1D.covering(30, 0.1)
        coupled = minimize_system(manakov_spec, ConstraintSpec(1.0, 1.0), grid)
        decoupled = minimize_system(CoupledGSpec.decoupled(), ConstraintSpec(1.0, 1.0), grid)
        assert coupled.energy.total < decoupled.energy.total

    def test_2d_grid_is_used_as_given(self):
        spec = CoupledGSpec(a1=0.25, a2=0.25, r1=1.5, r2=1.5, beta=0.0, dim=2)
        grid = Grid2D.centered(16, 16, 0.5, 0.5)
        cfg = FlowConfig(max_iter=20)
        result = minimize_system(spec, ConstraintSpec(1.0, 1.0), grid, cfg)
        assert result.grid == grid
        assert lp_norm(result.fields[1], 2.0) == pytest.approx(1.0, rel=1e-12)
        assert math.isfinite(result.energy.total)

    def test_non_finite_weight_raises_divergence(self, manakov_spec, monkeypatch):
        original = SystemFunctional.weights

        def singular_at_first_cell(functional, fields):
            weights = [w.copy() for w in original(functional, fields)]
            weights[0][0] = np.inf
            return weights

        monkeypatch.setattr(SystemFunctional, "weights", singular_at_first_cell)
        with pytest.raises(DivergenceError) as info:
            minimize_system(
                manakov_spec,
                ConstraintSpec(1.0, 1.0),
                Grid1D.covering(20, 0.2),
                FlowConfig(max_iter=5),
            )
        assert info.value.iteration == 1
        assert len(info.value.last_stable) == 2
        assert all(np.all(np.isfinite(f.values)) for f in info.value.last_stable)

    def test_non_finite_iterate_raises_divergence(self, manakov_spec, monkeypatch):
        monkeypatch.setattr(
            NormalizedGradientFlow, "_step", lambda flow, u, weight, tau: np.full(u.shape, np.nan)
        )
        with pytest.raises(DivergenceError, match="non-finite iterate") as info:
            minimize_system(
                manakov_spec,
                ConstraintSpec(1.0, 1.0),
                Grid1D.covering(20, 0.2),
                FlowConfig(max_iter=5),
            )
        assert info.value.iteration == 1
        assert all(np.all(np.isfinite(f.values)) for f in info.value.last_stable)
