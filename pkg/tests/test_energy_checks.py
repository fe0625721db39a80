"""
Tests for the energy checks: superadditivity of G, coercivity, subadditivity chains.
"""

import numpy as np
import pandas as pd
import pytest

from src.checks import energy_checks
from src.checks.energy_checks import (
    check_coercivity,
    check_energy_curve,
    check_g_superadditivity,
    check_subadditivity,
    check_system_subadditivity,
    cubic_soliton_energy,
)
from src.checks.profiles import bump_sum, disjoint_bump_pair, gaussian
from src.checks.report import CheckKind, CheckStatus, SuiteConfig
from src.core.exceptions import InvalidSpecError
from src.core.grid import Grid1D
from src.functionals.nonlinearity import CoupledGSpec, NonlinearitySpec
from src.solvers.gradient_flow import FlowConfig


@pytest.fixture
def cfg():
    return SuiteConfig(h=0.05, p_list=[1.0, 2.0])


def no_failures(reports):
    failing = [r.to_dict() for r in reports if r.status is CheckStatus.FAIL]
    assert not failing, failing


def test_cubic_soliton_energy():
    assert cubic_soliton_energy(2.0) == pytest.approx(-8.0 / 96.0)
    assert cubic_soliton_energy(1.0) < 0


@pytest.mark.unit
class TestGSuperadditivity:
    def test_decoupled_is_identity(self, rng, cfg):
        fields = [bump_sum(rng, 8.0).sample(cfg.h) for _ in range(4)]
        report = check_g_superadditivity(*fields, CoupledGSpec.decoupled(), cfg, label="decoupled")

        assert report.kind is CheckKind.EQUALITY
        assert report.passed
        assert report.check_id == "superadditivity.decoupled"

    def test_disjoint_supports(self, rng, cfg):
        spec = CoupledGSpec.manakov(beta=1.0)
        for _ in range(5):
            left_u, right_phi = disjoint_bump_pair(rng, 8.0)
            left_v, right_psi = disjoint_bump_pair(rng, 8.0)
            report = check_g_superadditivity(
                left_u.sample(cfg.h),
                left_v.sample(cfg.h),
                right_phi.sample(cfg.h),
                right_psi.sample(cfg.h),
                spec,
                cfg,
            )
            assert report.kind is CheckKind.NON_STRICT
            assert report.passed, report.to_dict()

    def test_overlapping_gaussians_strict(self, cfg):
        report = check_g_superadditivity(
            gaussian(1.0),
            gaussian(0.8),
            gaussian(1.2),
            gaussian(0.9),
            CoupledGSpec.manakov(beta=1.0),
            cfg,
            strict=True,
            label="gaussians",
        )
        assert report.kind is CheckKind.STRICT
        assert report.passed, report.to_dict()
        assert report.refinement_margin > 0

    def test_strict_needs_profiles(self, cfg):
        fields = [gaussian(1.0).sample(cfg.h) for _ in range(4)]
        report = check_g_superadditivity(
            *fields, CoupledGSpec.manakov(beta=1.0), cfg, strict=True
        )
        assert report.status is CheckStatus.INCONCLUSIVE

    def test_non_monotone_spec_rejected(self, cfg, monkeypatch):
        monkeypatch.setattr(CoupledGSpec, "monotone_on_lattice", lambda spec, *args: False)
        fields = [gaussian(1.0).sample(cfg.h) for _ in range(4)]
        with pytest.raises(InvalidSpecError, match="not monotone"):
            check_g_superadditivity(*fields, CoupledGSpec.manakov(beta=1.0), cfg)

    def test_sublinear_coupling_rejected_before_checking(self):
        with pytest.raises(InvalidSpecError):
            CoupledGSpec(beta=1.0, gamma1=0.6, gamma2=0.6)


@pytest.mark.unit
class TestCoercivity:
    def test_scalar(self, rng, cfg, cubic_spec):
        reports = check_coercivity(cubic_spec, 1.0, 20, rng, cfg)

        assert len(reports) == 21
        assert {r.check_id for r in reports} == {
            "coercivity.scalar",
            "coercivity.scalar.monotone-in-R",
        }
        assert all(r.passed for r in reports)

    def test_system(self, rng, cfg, manakov_spec):
        reports = check_coercivity(manakov_spec, 2.0, 20, rng, cfg)

        assert reports[0].check_id == "coercivity.system.monotone-in-R"
        assert all(r.passed for r in reports)
        assert reports[1].metadata["R"] == "2"


@pytest.mark.integration
@pytest.mark.slow
class TestEnergyChains:
    @pytest.fixture
    def flow(self):
        return FlowConfig(max_iter=5000, energy_tol=1e-12, residual_tol=1e-6)

    def test_scalar_subadditivity(self, cfg, flow):
        reports = check_subadditivity(
            NonlinearitySpec.power(3.0), 1.0, 1.0, Grid1D.covering(30.0, 0.1), flow, cfg
        )
        ids = {r.check_id for r in reports}
        assert "subadd[1,1].doubling-profile" in ids
        assert "subadd[1,1].closed-form" in ids
        no_failures(reports)

    def test_decoupled_split_closes_to_equality(self, cfg, flow):
        reports = check_system_subadditivity(
            CoupledGSpec.decoupled(),
            ((1.0, 0.0), (0.0, 1.0)),
            Grid1D.covering(30.0, 0.1),
            flow,
            cfg,
            label="decoupled-split",
        )
        assert {r.check_id for r in reports} == {
            "system-subadd.decoupled-split.chain.lower",
            "system-subadd.decoupled-split.negative",
            "system-subadd.decoupled-split.decoupled",
            "system-subadd.decoupled-split.chain.upper",
        }
        no_failures(reports)

    def test_coupled_split_is_strict(self, cfg, flow):
        reports = check_system_subadditivity(
            CoupledGSpec.manakov(),
            ((1.0, 0.0), (0.0, 1.0)),
            Grid1D.covering(30.0, 0.1),
            flow,
            cfg,
            label="coupled-split",
        )
        assert "system-subadd.coupled-split.strict" in {r.check_id for r in reports}
        no_failures(reports)

    def test_energy_curve(self, cfg, flow):
        reports = check_energy_curve(
            NonlinearitySpec.power(3.0), [1.0, 2.0], Grid1D.covering(30.0, 0.05), flow, cfg
        )
        ids = {r.check_id for r in reports}
        assert {"energy-curve.negative", "energy-curve.closed-form"} <= ids
        subadditive = [r for r in reports if r.check_id == "energy-curve.subadditive"]
        assert subadditive[0].metadata["pair"] == "1+1"
        no_failures(reports)


@pytest.mark.unit
def test_energy_curve_without_pairs_skips_subadditivity(cfg, monkeypatch):
    def fake_sweep(spec, alphas, grid, flowcfg):
        return pd.DataFrame(
            {"alpha": [1.0, 1.5], "energy": [-0.1, -0.2], "converged": [True, True]}
        )

    def fake_probe(spec, alpha, deltas, grid, flowcfg):
        return pd.DataFrame({"delta": deltas, "gap": [0.01, 0.02]})

    monkeypatch.setattr(energy_checks, "energy_curve_sweep", fake_sweep)
    monkeypatch.setattr(energy_checks, "continuity_probe", fake_probe)
    reports = check_energy_curve(
        NonlinearitySpec.power(2.5), [1.0, 1.5], Grid1D.centered(40, 0.5), FlowConfig(), cfg
    )
    by_id = {r.check_id: r for r in reports}

    assert by_id["energy-curve.subadditive"].status is CheckStatus.SKIPPED
    assert by_id["energy-curve.negative"].passed
    assert by_id["energy-curve.decreasing"].passed
    assert by_id["energy-curve.continuity"].passed
    assert "energy-curve.closed-form" not in by_id


@pytest.mark.unit
def test_unconverged_sweep_is_inconclusive(cfg, monkeypatch):
    monkeypatch.setattr(
        energy_checks,
        "energy_curve_sweep",
        lambda *args: pd.DataFrame(
            {"alpha": [1.0, 2.0], "energy": [-0.01, np.nan], "converged": [True, False]}
        ),
    )
    reports = check_energy_curve(
        NonlinearitySpec.power(3.0), [1.0, 2.0], Grid1D.centered(40, 0.5), FlowConfig(), cfg
    )
    assert reports
    assert all(r.status is CheckStatus.INCONCLUSIVE for r in reports)
    assert "energy-curve.closed-form" in {r.check_id for r in reports}
