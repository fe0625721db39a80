"""
Check reports and suite configuration for the inequality harness.
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence

from ..solvers.gradient_flow import FlowConfig


class CheckStatus(Enum):
    """Verdict of a single check."""

    PASS = "pass"
    FAIL = "fail"
    INCONCLUSIVE = "inconclusive"
    SKIPPED = "skipped"


class CheckKind(Enum):
    """How margin and tolerance turn into a verdict."""

    EQUALITY = "equality"
    NON_STRICT = "non-strict"
    STRICT = "strict"


def _stringify(metadata: Optional[Dict[str, Any]]) -> Dict[str, str]:
    return {str(k): str(v) for k, v in sorted((metadata or {}).items())}


@dataclass
class CheckReport:
    """
    One verified inequality or identity.

    margin is rhs - lhs for "lhs <= rhs" claims, lhs - rhs for "lhs >= rhs"
    claims and -|lhs - rhs| for identities. Non-strict and identity checks pass
    when margin >= -tolerance; strict checks need margin > tolerance at h and
    at h/2 (refinement_margin).
    """

    check_id: str
    lhs: float
    rhs: float
    margin: float
    tolerance: float
    passed: bool
    grid_h: float
    kind: CheckKind
    status: CheckStatus
    refinement_margin: Optional[float] = None
    metadata: Dict[str, str] = field(default_factory=dict)

    @classmethod
    def _verdict(
        cls,
        check_id: str,
        lhs: float,
        rhs: float,
        margin: float,
        tolerance: float,
        grid_h: float,
        kind: CheckKind,
        refinement_margin: Optional[float],
        metadata: Optional[Dict[str, Any]],
    ) -> "CheckReport":
        if kind is CheckKind.STRICT:
            passed = (
                margin > tolerance
                and refinement_margin is not None
                and refinement_margin > tolerance
            )
        else:
            passed = margin >= -tolerance
        if not all(math.isfinite(v) for v in (lhs, rhs, margin)):
            passed = False
        return cls(
            check_id=check_id,
            lhs=float(lhs),
            rhs=float(rhs),
            margin=float(margin),
            tolerance=float(tolerance),
            passed=bool(passed),
            grid_h=float(grid_h),
            kind=kind,
            status=CheckStatus.PASS if passed else CheckStatus.FAIL,
            refinement_margin=None if refinement_margin is None else float(refinement_margin),
            metadata=_stringify(metadata),
        )

    @classmethod
    def at_most(
        cls,
        check_id: str,
        lhs: float,
        rhs: float,
        tolerance: float,
        grid_h: float,
        refinement_margin: Optional[float] = None,
        metadata: Optional[Dict[str, Any]] = None,
    ) -> "CheckReport":
        """Non-strict claim lhs <= rhs."""
        return cls._verdict(
            check_id,
            lhs,
            rhs,
            rhs - lhs,
            tolerance,
            grid_h,
            CheckKind.NON_STRICT,
            refinement_margin,
            metadata,
        )

    @classmethod
    def at_least(
        cls,
        check_id: str,
        lhs: float,
        rhs: float,
        tolerance: float,
        grid_h: float,
        refinement_margin: Optional[float] = None,
        metadata: Optional[Dict[str, Any]] = None,
    ) -> "CheckReport":
        """Non-strict claim lhs >= rhs."""
        return cls._verdict(
            check_id,
            lhs,
            rhs,
            lhs - rhs,
            tolerance,
            grid_h,
            CheckKind.NON_STRICT,
            refinement_margin,
            metadata,
        )

    @classmethod
    def strictly_less(
        cls,
        check_id: str,
        lhs: float,
        rhs: float,
        tolerance: float,
        grid_h: float,
        refinement_margin: Optional[float],
        metadata: Optional[Dict[str, Any]] = None,
    ) -> "CheckReport":
        """Strict claim lhs < rhs, confirmed at two resolutions."""
        return cls._verdict(
            check_id,
            lhs,
            rhs,
            rhs - lhs,
            tolerance,
            grid_h,
            CheckKind.STRICT,
            refinement_margin,
            metadata,
        )

    @classmethod
    def strictly_greater(
        cls,
        check_id: str,
        lhs: float,
        rhs: float,
        tolerance: float,
        grid_h: float,
        refinement_margin: Optional[float],
        metadata: Optional[Dict[str, Any]] = None,
    ) -> "CheckReport":
        """Strict claim lhs > rhs, confirmed at two resolutions."""
        return cls._verdict(
            check_id,
            lhs,
            rhs,
            lhs - rhs,
            tolerance,
            grid_h,
            CheckKind.STRICT,
            refinement_margin,
            metadata,
        )

    @classmethod
    def equality(
        cls,
        check_id: str,
        lhs: float,
        rhs: float,
        tolerance: float,
        grid_h: float,
        metadata: Optional[Dict[str, Any]] = None,
    ) -> "CheckReport":
        """Identity lhs == rhs within tolerance (0 for bit-exact claims)."""
        return cls._verdict(
            check_id,
            lhs,
            rhs,
            -abs(lhs - rhs),
            tolerance,
            grid_h,
            CheckKind.EQUALITY,
            None,
            metadata,
        )

    @classmethod
    def _without_verdict(
        cls, check_id: str, grid_h: float, status: CheckStatus, kind: CheckKind, reason: str
    ) -> "CheckReport":
        return cls(
            check_id=check_id,
            lhs=0.0,
            rhs=0.0,
            margin=0.0,
            tolerance=0.0,
            passed=False,
            grid_h=float(grid_h),
            kind=kind,
            status=status,
            metadata={"reason": reason},
        )

    @classmethod
    def inconclusive(
        cls, check_id: str, grid_h: float, reason: str, kind: CheckKind = CheckKind.STRICT
    ) -> "CheckReport":
        return cls._without_verdict(check_id, grid_h, CheckStatus.INCONCLUSIVE, kind, reason)

    @classmethod
    def skipped(
        cls, check_id: str, grid_h: float, reason: str, kind: CheckKind = CheckKind.EQUALITY
    ) -> "CheckReport":
        return cls._without_verdict(check_id, grid_h, CheckStatus.SKIPPED, kind, reason)

    @property
    def slack(self) -> float:
        """Distance from the pass/fail boundary; negative when failing."""
        if self.kind is CheckKind.STRICT:
            worst = self.margin if self.refinement_margin is None else min(
                self.margin, self.refinement_margin
            )
            return worst - self.tolerance
        return self.margin + self.tolerance

    def with_metadata(self, **extra: Any) -> "CheckReport":
        merged = dict(self.metadata)
        merged.update(_stringify(extra))
        return CheckReport(**{**self.__dict__, "metadata": dict(sorted(merged.items()))})

    def to_dict(self) -> Dict[str, Any]:
        return {
            "check_id": self.check_id,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "margin": self.margin,
            "tolerance": self.tolerance,
            "pass": self.passed,
            "grid_h": self.grid_h,
            "refinement_margin": self.refinement_margin,
            "kind": self.kind.value,
            "status": self.status.value,
            "metadata": self.metadata,
        }


def worst_of(reports: Sequence[CheckReport]) -> CheckReport:
    """
    Collapse repeated reports of one check into the tightest one.

    Failing and inconclusive reports win over passing ones; skipped reports
    only survive when nothing else was evaluated.
    """
    if not reports:
        raise ValueError("worst_of needs at least one report")
    evaluated = [r for r in reports if r.status is not CheckStatus.SKIPPED] or list(reports)
    rank = {CheckStatus.FAIL: 0, CheckStatus.INCONCLUSIVE: 1, CheckStatus.PASS: 2}
    worst = min(
        enumerate(evaluated),
        key=lambda item: (rank.get(item[1].status, 3), item[1].slack, item[0]),
    )[1]
    return worst.with_metadata(samples=len(reports), evaluated=len(evaluated))


def collapse(reports: Sequence[CheckReport]) -> List[CheckReport]:
    """worst_of per check_id, sorted by check_id."""
    grouped: Dict[str, List[CheckReport]] = {}
    for report in reports:
        grouped.setdefault(report.check_id, []).append(report)
    return [worst_of(grouped[check_id]) for check_id in sorted(grouped)]


@dataclass
class SuiteConfig:
    """Parameters of a verification run; deterministic given the seed."""

    seed: int = 7
    suites: List[str] = field(default_factory=lambda: ["all"])
    field_count: int = 1000
    gradient_field_count: int = 200
    profile_count: int = 100
    coercivity_count: int = 500
    p_list: List[float] = field(default_factory=lambda: [1.0, 2.0, 2.5, 3.0, 4.0])
    h: float = 0.05
    flow_h: float = 0.05
    domain_half_width: float = 8.0
    gradient_constant: float = 1.0
    strict_delta: float = 1e-3
    exact_rtol: float = 1e-12
    jobs: int = 1
    flow: FlowConfig = field(default_factory=FlowConfig)

    @property
    def strict_delta_rule(self) -> str:
        return f"delta(h) = {self.strict_delta:g} * h * |rhs|"

    def strict_tolerance(self, h: float, scale: float) -> float:
        return self.strict_delta * h * abs(scale)

    def gradient_tolerance(self, h: float, scale: float) -> float:
        return self.gradient_constant * h * abs(scale)

    def exact_tolerance(self, scale: float) -> float:
        return self.exact_rtol * abs(scale)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SuiteConfig":
        known = set(cls.__dataclass_fields__) - {"flow"}
        values = {k: v for k, v in data.items() if k in known}
        if "p_list" in values:
            values["p_list"] = [float(p) for p in values["p_list"]]
        if "suites" in values and isinstance(values["suites"], str):
            values["suites"] = [values["suites"]]
        flow = data.get("flow")
        if isinstance(flow, FlowConfig):
            values["flow"] = flow
        elif isinstance(flow, dict):
            values["flow"] = FlowConfig.from_dict(flow)
        return cls(**values)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "seed": self.seed,
            "suites": list(self.suites),
            "field_count": self.field_count,
            "gradient_field_count": self.gradient_field_count,
            "profile_count": self.profile_count,
            "coercivity_count": self.coercivity_count,
            "p_list": list(self.p_list),
            "h": self.h,
            "flow_h": self.flow_h,
            "domain_half_width": self.domain_half_width,
            "gradient_constant": self.gradient_constant,
            "strict_delta": self.strict_delta,
            "strict_delta_rule": self.strict_delta_rule,
            "exact_rtol": self.exact_rtol,
            "flow": self.flow.to_dict(),
        }
