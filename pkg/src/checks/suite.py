"""
Verification suite runner.
Builds the check jobs of every suite, runs them on a worker pool and collects the reports.
"""

import asyncio
import logging
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Set

import numpy as np
import pandas as pd
from rich.console import Console
from rich.table import Table

from ..core.exceptions import DomainError, RearrangementKitError
from ..core.grid import Grid1D
from ..functionals.nonlinearity import CoupledGSpec, NonlinearitySpec
from ..utils.logger import StructuredLogger, get_performance_logger
from ..utils.manifest import RunManifest
from .energy_checks import (
    check_coercivity,
    check_energy_curve,
    check_g_superadditivity,
    check_subadditivity,
    check_system_subadditivity,
)
from .profiles import (
    bump_sum,
    bump_sum_2d,
    decaying_exponential,
    disjoint_bump_pair,
    gaussian,
    sech_profile,
    tent,
    two_bump,
)
from .rearrangement_checks import (
    Expectation,
    check_additivity,
    check_coupled_identities,
    check_doubling_profile,
    check_gradient_inequality,
    check_multiplicity_bound,
    check_scaling_ratio,
    check_schwarz_contraction,
    check_steiner_properties,
)
from .report import CheckKind, CheckReport, CheckStatus, SuiteConfig, collapse

SUITE_NAMES = (
    "steiner",
    "coupled-identities",
    "additivity",
    "gradient",
    "multiplicity",
    "superadditivity",
    "coercivity",
    "energy-curve",
    "subadd",
    "system-subadd",
)

# Short suite names; lemma2 keeps only the non-strict claims of its suite
SUITE_ALIASES = {
    "prop1": "steiner",
    "lemma1": "coupled-identities",
    "lemma3": "additivity",
    "lemma2": "gradient",
    "thm1": "gradient",
    "duff": "multiplicity",
    "lemma10": "superadditivity",
}
NON_STRICT_ALIASES = frozenset({"lemma2"})

JobRunner = Callable[[np.random.Generator], List[CheckReport]]


@dataclass
class CheckJob:
    """One independent unit of work; its generator is seeded from (seed, crc32(name))."""

    name: str
    suite: str
    run: JobRunner


@dataclass
class SuiteResult:
    """Collapsed reports of a suite run plus per-job timings."""

    reports: List[CheckReport]
    config: SuiteConfig
    timings: Dict[str, float] = field(default_factory=dict)

    def counts(self) -> Dict[str, int]:
        counts = {status.value: 0 for status in CheckStatus}
        for report in self.reports:
            counts[report.status.value] += 1
        return counts

    @property
    def exit_code(self) -> int:
        """0 when every report passed or was skipped, 1 otherwise."""
        ok = (CheckStatus.PASS, CheckStatus.SKIPPED)
        return 0 if all(r.status in ok for r in self.reports) else 1

    def to_dict(self, manifest: Optional[RunManifest] = None) -> Dict[str, Any]:
        data: Dict[str, Any] = {"reports": [r.to_dict() for r in self.reports]}
        if manifest is not None:
            data["manifest"] = manifest.to_dict()
        return data

    def refinement_table(self) -> pd.DataFrame:
        """(check_id, h, margin) rows for every report with a refinement margin, h halving."""
        rows = []
        for r in self.reports:
            if r.refinement_margin is None:
                continue
            rows.append({"check_id": r.check_id, "h": r.grid_h, "margin": r.margin})
            rows.append(
                {"check_id": r.check_id, "h": r.grid_h / 2.0, "margin": r.refinement_margin}
            )
        return pd.DataFrame(rows, columns=["check_id", "h", "margin"])

    def render(self, console: Optional[Console] = None, failures_only: bool = False) -> None:
        """Print a summary table of the reports."""
        console = console or Console()
        table = Table(title=f"Verification (seed {self.config.seed})")
        table.add_column("check", style="cyan")
        table.add_column("kind")
        table.add_column("status")
        table.add_column("margin", justify="right")
        table.add_column("tolerance", justify="right")
        table.add_column("samples", justify="right")
        styles = {"pass": "green", "fail": "red", "inconclusive": "yellow", "skipped": "dim"}
        for r in self.reports:
            if failures_only and r.status in (CheckStatus.PASS, CheckStatus.SKIPPED):
                continue
            status = r.status.value
            table.add_row(
                r.check_id,
                r.kind.value,
                f"[{styles[status]}]{status}[/{styles[status]}]",
                f"{r.margin:.3e}",
                f"{r.tolerance:.3e}",
                r.metadata.get("samples", "1"),
            )
        console.print(table)
        console.print(" | ".join(f"{k}: {v}" for k, v in self.counts().items()))


class VerificationSuite:
    """
    Runs the checks selected by a SuiteConfig.

    Features:
    - Seeded random and canonical inputs per suite
    - Independent jobs on a thread pool of `jobs` workers
    - Reports collapsed to the worst case per check id and sorted by id
    """

    def __init__(self, config: SuiteConfig):
        self.config = config
        self.logger = logging.getLogger(__name__)
        self.structured = StructuredLogger(self.logger)
        self.performance = get_performance_logger()
        self._timings: Dict[str, float] = {}
        self._non_strict: Set[str] = set()

    def selected_suites(self) -> List[str]:
        chosen: List[str] = []
        for name in self.config.suites:
            if name == "all":
                chosen.extend(SUITE_NAMES)
            elif name in SUITE_NAMES:
                chosen.append(name)
            elif name in SUITE_ALIASES:
                chosen.append(SUITE_ALIASES[name])
            else:
                choices = ", ".join(SUITE_NAMES + tuple(SUITE_ALIASES))
                raise DomainError(f"unknown suite '{name}'; choose from {choices}")
        return [name for name in SUITE_NAMES if name in chosen]

    def non_strict_suites(self) -> Set[str]:
        """Suites requested only through a non-strict alias; their strict reports are dropped."""
        full = set()
        for name in self.config.suites:
            if name == "all":
                full.update(SUITE_NAMES)
            elif name not in NON_STRICT_ALIASES:
                full.add(SUITE_ALIASES.get(name, name))
        partial = {SUITE_ALIASES[name] for name in self.config.suites if name in NON_STRICT_ALIASES}
        return partial - full

    def jobs(self) -> List[CheckJob]:
        builders = {
            "steiner": self._steiner_jobs,
            "coupled-identities": self._coupled_identity_jobs,
            "additivity": self._additivity_jobs,
            "gradient": self._gradient_jobs,
            "multiplicity": self._multiplicity_jobs,
            "superadditivity": self._superadditivity_jobs,
            "coercivity": self._coercivity_jobs,
            "energy-curve": self._energy_curve_jobs,
            "subadd": self._subadd_jobs,
            "system-subadd": self._system_subadd_jobs,
        }
        return [job for suite in self.selected_suites() for job in builders[suite]()]

    def rng_for(self, job_name: str) -> np.random.Generator:
        return np.random.default_rng([self.config.seed, zlib.crc32(job_name.encode("utf-8"))])

    # Job builders

    def _steiner_jobs(self) -> List[CheckJob]:
        cfg = self.config

        def random_fields(rng: np.random.Generator) -> List[CheckReport]:
            reports = []
            for _ in range(cfg.gradient_field_count):
                profile = bump_sum_2d(rng, half_width=8.0, half_height=2.0)
                reports += check_steiner_properties(
                    profile.sample(0.5), cfg.p_list, cfg, refined=profile.sample(0.25)
                )
            return reports

        def schwarz(rng: np.random.Generator) -> List[CheckReport]:
            reports = []
            for _ in range(20):
                profile = bump_sum_2d(rng, half_width=4.0, half_height=4.0)
                reports += check_schwarz_contraction(profile.sample(0.25), cfg)
            return reports

        return [
            CheckJob("steiner.random", "steiner", random_fields),
            CheckJob("steiner.schwarz", "steiner", schwarz),
        ]

    def _coupled_identity_jobs(self) -> List[CheckJob]:
        cfg = self.config

        def run(rng: np.random.Generator) -> List[CheckReport]:
            reports = []
            for _ in range(cfg.field_count):
                left, right = disjoint_bump_pair(rng, cfg.domain_half_width)
                u = left.sample(cfg.h)
                v = right.sample(cfg.h)
                s = float(rng.uniform(0.0, 0.5)) * float(max(u.values.max(), v.values.max()))
                reports += check_coupled_identities(u, v, s, (3, -5), cfg)
            return reports

        return [CheckJob("coupled-identities", "coupled-identities", run)]

    def _additivity_jobs(self) -> List[CheckJob]:
        cfg = self.config
        p_list = [p for p in cfg.p_list if p >= 1]

        def random_pairs(rng: np.random.Generator) -> List[CheckReport]:
            reports = []
            for _ in range(cfg.field_count):
                u = bump_sum(rng, cfg.domain_half_width).sample(cfg.h)
                v = bump_sum(rng, cfg.domain_half_width).sample(cfg.h, staggered=True)
                reports += check_additivity(u, v, p_list, cfg, rng)
            return reports

        def canonical(rng: np.random.Generator) -> List[CheckReport]:
            u = gaussian().sample(cfg.h)
            reports = [
                r.with_metadata(case="second field zero")
                for r in check_additivity(u, u.with_values(np.zeros(u.grid.n)), p_list, cfg, rng)
            ]
            reports.append(check_doubling_profile(gaussian(), 0.01))
            return reports

        return [
            CheckJob("additivity.random", "additivity", random_pairs),
            CheckJob("additivity.canonical", "additivity", canonical),
        ]

    def _gradient_jobs(self) -> List[CheckJob]:
        cfg = self.config

        def random_1d(rng: np.random.Generator) -> List[CheckReport]:
            reports = []
            for _ in range(cfg.gradient_field_count):
                u = bump_sum(rng, cfg.domain_half_width)
                v = bump_sum(rng, cfg.domain_half_width)
                reports += check_gradient_inequality(u, v, cfg.p_list, cfg, label="random")
            return reports

        def random_2d(rng: np.random.Generator) -> List[CheckReport]:
            reports = []
            for _ in range(20):
                u = bump_sum_2d(rng, half_width=8.0, half_height=2.0)
                v = bump_sum_2d(rng, half_width=8.0, half_height=2.0)
                reports += check_gradient_inequality(
                    u, v, [2.0], cfg, h=0.25, label="random-2d"
                )
            return reports

        def canonical(rng: np.random.Generator) -> List[CheckReport]:
            reports = [check_scaling_ratio(gaussian(), 0.01)]
            reports += check_gradient_inequality(
                gaussian(), sech_profile(), cfg.p_list, cfg, label="gaussian-sech"
            )
            reports += check_gradient_inequality(
                gaussian(), gaussian(), [2.0], cfg, h=0.01, label="gaussian-pair"
            )
            return reports

        return [
            CheckJob("gradient.random", "gradient", random_1d),
            CheckJob("gradient.random-2d", "gradient", random_2d),
            CheckJob("gradient.canonical", "gradient", canonical),
        ]

    def _multiplicity_jobs(self) -> List[CheckJob]:
        cfg = self.config
        p_list = [1.0, 2.0, 3.0]

        def canonical(rng: np.random.Generator) -> List[CheckReport]:
            seed = int(rng.integers(2**31))
            reports = check_multiplicity_bound(
                decaying_exponential(), p_list, seed, cfg, Expectation.EQUALITY, "monotone"
            )
            reports += check_multiplicity_bound(
                tent(4.0), p_list, seed, cfg, Expectation.EQUALITY, "tent"
            )
            return reports

        def two_bumps(rng: np.random.Generator) -> List[CheckReport]:
            reports = []
            for _ in range(cfg.profile_count):
                profile = two_bump(rng)
                seed = int(rng.integers(2**31))
                reports += check_multiplicity_bound(
                    profile, p_list, seed, cfg, Expectation.STRICT, "two-bump"
                )
            return reports

        def random_fields(rng: np.random.Generator) -> List[CheckReport]:
            reports = []
            for _ in range(cfg.profile_count):
                f = bump_sum(rng, cfg.domain_half_width).sample(cfg.h)
                seed = int(rng.integers(2**31))
                reports += check_multiplicity_bound(f, cfg.p_list, seed, cfg, label="random")
            return reports

        return [
            CheckJob("multiplicity.canonical", "multiplicity", canonical),
            CheckJob("multiplicity.two-bump", "multiplicity", two_bumps),
            CheckJob("multiplicity.random", "multiplicity", random_fields),
        ]

    def _superadditivity_jobs(self) -> List[CheckJob]:
        cfg = self.config

        def decoupled(rng: np.random.Generator) -> List[CheckReport]:
            spec = CoupledGSpec.decoupled()
            reports = []
            for _ in range(max(1, cfg.field_count // 10)):
                fields = [bump_sum(rng, cfg.domain_half_width).sample(cfg.h) for _ in range(4)]
                reports.append(check_g_superadditivity(*fields, spec, cfg, label="decoupled"))
            return reports

        def coupled(rng: np.random.Generator) -> List[CheckReport]:
            spec = CoupledGSpec.manakov(beta=1.0)
            reports = [
                check_g_superadditivity(
                    gaussian(1.0),
                    gaussian(0.8),
                    gaussian(1.2),
                    gaussian(0.9),
                    spec,
                    cfg,
                    strict=True,
                    label="overlapping-gaussians",
                )
            ]
            for _ in range(max(1, cfg.field_count // 10)):
                left_u, right_phi = disjoint_bump_pair(rng, cfg.domain_half_width)
                left_v, right_psi = disjoint_bump_pair(rng, cfg.domain_half_width)
                reports.append(
                    check_g_superadditivity(
                        left_u.sample(cfg.h),
                        left_v.sample(cfg.h),
                        right_phi.sample(cfg.h),
                        right_psi.sample(cfg.h),
                        spec,
                        cfg,
                        label="disjoint",
                    )
                )
            return reports

        return [
            CheckJob("superadditivity.decoupled", "superadditivity", decoupled),
            CheckJob("superadditivity.coupled", "superadditivity", coupled),
        ]

    def _coercivity_jobs(self) -> List[CheckJob]:
        cfg = self.config

        def scalar(rng: np.random.Generator) -> List[CheckReport]:
            spec = NonlinearitySpec.power(3.0)
            return check_coercivity(spec, 1.0, cfg.coercivity_count, rng, cfg)

        def system(rng: np.random.Generator) -> List[CheckReport]:
            return check_coercivity(CoupledGSpec.manakov(), 1.0, cfg.coercivity_count, rng, cfg)

        return [
            CheckJob("coercivity.scalar", "coercivity", scalar),
            CheckJob("coercivity.system", "coercivity", system),
        ]

    def _flow_grid(self) -> Grid1D:
        return Grid1D.covering(2.0 * self.config.domain_half_width, self.config.flow_h)

    def _energy_curve_jobs(self) -> List[CheckJob]:
        cfg = self.config

        def run(rng: np.random.Generator) -> List[CheckReport]:
            return check_energy_curve(
                NonlinearitySpec.power(3.0), [0.5, 1.0, 1.5, 2.0], self._flow_grid(), cfg.flow, cfg
            )

        return [CheckJob("energy-curve", "energy-curve", run)]

    def _subadd_jobs(self) -> List[CheckJob]:
        cfg = self.config
        spec = NonlinearitySpec.power(3.0)

        def job(alpha: float, beta: float) -> CheckJob:
            def run(rng: np.random.Generator) -> List[CheckReport]:
                return check_subadditivity(spec, alpha, beta, self._flow_grid(), cfg.flow, cfg)

            return CheckJob(f"subadd[{alpha:g},{beta:g}]", "subadd", run)

        return [job(1.0, 1.0), job(1.0, 2.0)]

    def _system_subadd_jobs(self) -> List[CheckJob]:
        cfg = self.config
        cases = [
            ("coupled-split", CoupledGSpec.manakov(), ((1.0, 0.0), (0.0, 1.0))),
            ("coupled-pairs", CoupledGSpec.manakov(), ((1.0, 1.0), (1.0, 1.0))),
            ("decoupled-split", CoupledGSpec.decoupled(), ((1.0, 0.0), (0.0, 1.0))),
        ]

        def job(label: str, spec: CoupledGSpec, masses) -> CheckJob:
            def run(rng: np.random.Generator) -> List[CheckReport]:
                return check_system_subadditivity(
                    spec, masses, self._flow_grid(), cfg.flow, cfg, label=label
                )

            return CheckJob(f"system-subadd.{label}", "system-subadd", run)

        return [job(*case) for case in cases]

    # Execution

    def _run_job(self, job: CheckJob) -> List[CheckReport]:
        self.performance.start_timer(job.name)
        try:
            reports = job.run(self.rng_for(job.name))
            if job.suite in self._non_strict:
                reports = [r for r in reports if r.kind is not CheckKind.STRICT]
        except RearrangementKitError as e:
            self.logger.error(f"Check job {job.name} failed: {e}")
            reports = [
                CheckReport.inconclusive(
                    f"{job.name}.error", self.config.h, f"{type(e).__name__}: {e}"
                )
            ]
        duration = self.performance.end_timer(job.name, f"Check job {job.name}")
        self._timings[job.name] = duration or 0.0
        return reports

    async def run_async(self) -> SuiteResult:
        """Run every selected job on a pool of config.jobs threads."""
        jobs = self.jobs()
        self._timings = {}
        self._non_strict = self.non_strict_suites()
        self.logger.info(f"Running {len(jobs)} check jobs with {self.config.jobs} worker(s)")

        loop = asyncio.get_running_loop()
        with ThreadPoolExecutor(max_workers=max(1, self.config.jobs)) as pool:
            batches = await asyncio.gather(
                *(loop.run_in_executor(pool, self._run_job, job) for job in jobs)
            )

        reports = collapse([report for batch in batches for report in batch])
        for report in reports:
            if report.status is not CheckStatus.PASS:
                self.structured.log_check_report(report.to_dict())
        result = SuiteResult(reports=reports, config=self.config, timings=dict(self._timings))
        self.structured.log_suite_summary(result.counts())
        return result

    def run(self) -> SuiteResult:
        return asyncio.run(self.run_async())


def run_all(cfg: SuiteConfig) -> SuiteResult:
    """Run the configured suites; SuiteResult.exit_code gives the process status."""
    return VerificationSuite(cfg).run()

