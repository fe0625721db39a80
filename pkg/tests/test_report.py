"""
Tests for check reports and the suite configuration.
"""

import math

import pytest

from src.checks.report import (
    CheckKind,
    CheckReport,
    CheckStatus,
    SuiteConfig,
    collapse,
    worst_of,
)
from src.solvers.gradient_flow import FlowConfig, FlowScheme

pytestmark = pytest.mark.unit


class TestVerdicts:
    def test_at_most(self):
        ok = CheckReport.at_most("c", 1.0, 2.0, 0.0, 0.1)
        assert ok.passed and ok.margin == 1.0 and ok.status is CheckStatus.PASS
        within = CheckReport.at_most("c", 2.05, 2.0, 0.1, 0.1)
        assert within.passed
        bad = CheckReport.at_most("c", 3.0, 2.0, 0.1, 0.1)
        assert not bad.passed and bad.status is CheckStatus.FAIL

    def test_at_least(self):
        assert CheckReport.at_least("c", 2.0, 1.0, 0.0, 0.1).margin == 1.0
        assert not CheckReport.at_least("c", 1.0, 2.0, 0.0, 0.1).passed

    def test_strict_needs_both_resolutions(self):
        assert CheckReport.strictly_less("c", 1.0, 2.0, 0.1, 0.1, 0.5).passed
        assert not CheckReport.strictly_less("c", 1.0, 2.0, 0.1, 0.1, None).passed
        assert not CheckReport.strictly_less("c", 1.0, 2.0, 0.1, 0.1, 0.05).passed
        assert not CheckReport.strictly_less("c", 1.95, 2.0, 0.1, 0.1, 0.5).passed
        assert CheckReport.strictly_greater("c", 2.0, 1.0, 0.1, 0.1, 0.5).passed

    def test_equality(self):
        exact = CheckReport.equality("c", 1.0, 1.0, 0.0, 0.1)
        assert exact.passed and exact.kind is CheckKind.EQUALITY
        assert not CheckReport.equality("c", 1.0, 1.0 + 1e-15, 0.0, 0.1).passed
        assert CheckReport.equality("c", 1.0, 1.5, 0.5, 0.1).margin == -0.5

    def test_non_finite_never_passes(self):
        assert not CheckReport.at_most("c", math.nan, 1.0, 1.0, 0.1).passed
        assert not CheckReport.at_most("c", -math.inf, 1.0, 1.0, 0.1).passed

    def test_without_verdict(self):
        report = CheckReport.inconclusive("c", 0.1, "did not converge")
        assert report.status is CheckStatus.INCONCLUSIVE
        assert report.metadata == {"reason": "did not converge"}
        assert CheckReport.skipped("c", 0.1, "overlap").status is CheckStatus.SKIPPED

    def test_slack(self):
        assert CheckReport.at_most("c", 1.0, 2.0, 0.5, 0.1).slack == 1.5
        strict = CheckReport.strictly_less("c", 1.0, 2.0, 0.1, 0.1, 0.5)
        assert strict.slack == pytest.approx(0.4)

    def test_to_dict(self):
        data = CheckReport.at_most("c", 1.0, 2.0, 0.0, 0.1, metadata={"n": 3}).to_dict()
        assert data["pass"] is True
        assert data["kind"] == "non-strict"
        assert data["status"] == "pass"
        assert data["metadata"] == {"n": "3"}
        assert data["refinement_margin"] is None


class TestCollapse:
    def test_worst_of_prefers_failures(self):
        reports = [
            CheckReport.at_most("c", 1.0, 2.0, 0.0, 0.1),
            CheckReport.at_most("c", 3.0, 2.0, 0.0, 0.1),
            CheckReport.at_most("c", 1.9, 2.0, 0.0, 0.1),
        ]
        worst = worst_of(reports)
        assert worst.status is CheckStatus.FAIL
        assert worst.lhs == 3.0
        assert worst.metadata["samples"] == "3"

    def test_worst_of_tightest_pass(self):
        reports = [
            CheckReport.at_most("c", 1.0, 2.0, 0.0, 0.1),
            CheckReport.at_most("c", 1.9, 2.0, 0.0, 0.1),
        ]
        assert worst_of(reports).lhs == 1.9

    def test_skipped_only_when_nothing_evaluated(self):
        skipped = CheckReport.skipped("c", 0.1, "overlap")
        evaluated = CheckReport.equality("c", 0.0, 0.0, 0.0, 0.1)
        assert worst_of([skipped, evaluated]).status is CheckStatus.PASS
        assert worst_of([skipped]).status is CheckStatus.SKIPPED

    def test_worst_of_empty(self):
        with pytest.raises(ValueError):
            worst_of([])

    def test_collapse_sorts_ids(self):
        reports = [
            CheckReport.at_most("b", 1.0, 2.0, 0.0, 0.1),
            CheckReport.at_most("a", 1.0, 2.0, 0.0, 0.1),
            CheckReport.at_most("b", 1.5, 2.0, 0.0, 0.1),
        ]
        collapsed = collapse(reports)
        assert [r.check_id for r in collapsed] == ["a", "b"]
        assert collapsed[1].lhs == 1.5


class TestSuiteConfig:
    def test_defaults(self):
        cfg = SuiteConfig()
        assert cfg.seed == 7
        assert cfg.suites == ["all"]
        assert cfg.strict_tolerance(0.1, -2.0) == pytest.approx(2e-4)

    def test_from_dict(self):
        cfg = SuiteConfig.from_dict(
            {
                "seed": 3,
                "suites": "steiner",
                "p_list": [1, 2],
                "flow": {"scheme": "explicit"},
                "unknown": True,
            }
        )
        assert cfg.seed == 3
        assert cfg.suites == ["steiner"]
        assert cfg.p_list == [1.0, 2.0]
        assert cfg.flow.scheme is FlowScheme.EXPLICIT

    def test_to_dict_round_trip_without_jobs(self):
        cfg = SuiteConfig(jobs=4, flow=FlowConfig(max_iter=10))
        data = cfg.to_dict()
        assert "jobs" not in data
        assert "strict_delta_rule" in data
        again = SuiteConfig.from_dict(data)
        assert again.flow.max_iter == 10
        assert again.to_dict() == data
