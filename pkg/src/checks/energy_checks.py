"""
Checks on energies: superadditivity of the coupling potential, subadditivity of
the ground-state energy, coercivity and the shape of the energy curve.
"""

import logging
import math
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..core.exceptions import InvalidSpecError
from ..core.grid import Field, Field1D, Grid1D, Grid2D, fsum, integrate, require_same_grid
from ..core.rearrange import coupled_rearrangement
from ..functionals.energy import (
    coercivity_bound,
    dirichlet_integral,
    scalar_energy,
    system_energy,
)
from ..functionals.nonlinearity import CoupledGSpec, NonlinearityKind, NonlinearitySpec
from ..solvers.gradient_flow import (
    ConstraintSpec,
    FlowConfig,
    MinimizeResult,
    minimize_scalar,
    minimize_system,
)
from ..solvers.sweep import continuity_probe, energy_curve_sweep
from .profiles import Profile, bump_sum, gaussian
from .report import CheckKind, CheckReport, SuiteConfig

logger = logging.getLogger(__name__)

Grid = Union[Grid1D, Grid2D]
MassPair = Tuple[float, float]

# Relative agreement with the cubic soliton energy -alpha^3 / 96
CLOSED_FORM_RTOL = 1e-3


def cubic_soliton_energy(alpha: float) -> float:
    """Ground-state energy of 1/2 int u'^2 - 1/4 int u^4 at mass alpha on the line."""
    return -(alpha**3) / 96.0


def _is_cubic_1d(spec: NonlinearitySpec) -> bool:
    return spec.kind is NonlinearityKind.POWER and spec.p == 3.0 and spec.dim == 1


def _partner_grid(grid: Grid) -> Grid:
    """Grid for the second minimizer, so equal profiles interleave when coupled."""
    return grid.staggered() if isinstance(grid, Grid1D) else grid


def _mass(u: Field) -> float:
    return integrate(u, u.values**2)


def _g_integral(a: Field, b: Field, spec: CoupledGSpec) -> float:
    return integrate(a, spec.G(a.values**2, b.values**2))


def _sample_quadruple(
    fields: Sequence[Union[Field1D, Profile]], h: float
) -> Tuple[Field1D, Field1D, Field1D, Field1D]:
    u, v, phi, psi = (
        f.sample(h, staggered=k >= 2) if isinstance(f, Profile) else f
        for k, f in enumerate(fields)
    )
    return u, v, phi, psi


def _superadditivity_sides(
    u: Field1D, v: Field1D, phi: Field1D, psi: Field1D, spec: CoupledGSpec
) -> Tuple[float, float]:
    require_same_grid(u, v)
    require_same_grid(phi, psi)
    a = coupled_rearrangement(u, phi)
    b = coupled_rearrangement(v, psi)
    lhs = _g_integral(a, b, spec)
    rhs = fsum(np.array([_g_integral(u, v, spec), _g_integral(phi, psi, spec)]))
    return lhs, rhs


def check_g_superadditivity(
    u: Union[Field1D, Profile],
    v: Union[Field1D, Profile],
    phi: Union[Field1D, Profile],
    psi: Union[Field1D, Profile],
    spec: CoupledGSpec,
    cfg: SuiteConfig,
    strict: bool = False,
    label: str = "pair",
) -> CheckReport:
    """
    int G((u * phi)^2, (v * psi)^2) >= int G(u^2, v^2) + int G(phi^2, psi^2).

    (u, v) share a grid, as do (phi, psi). Profiles are sampled at cfg.h, the
    second pair on the staggered grid; with strict=True they are also sampled
    at h/2 and the claim becomes strict. A decoupled spec gives an identity.

    Raises:
        InvalidSpecError: g1, g2 not monotone on the lattice up to the largest square
    """
    u_h, v_h, phi_h, psi_h = _sample_quadruple((u, v, phi, psi), cfg.h)
    sigma = max(float(np.max(f.values**2, initial=0.0)) for f in (u_h, v_h, phi_h, psi_h))
    if not spec.monotone_on_lattice(max(sigma, 1e-12)):
        raise InvalidSpecError(f"g1, g2 are not monotone on [0, {sigma:.3g}]^2")

    h = u_h.grid.h
    lhs, rhs = _superadditivity_sides(u_h, v_h, phi_h, psi_h, spec)
    if spec.beta == 0:
        return CheckReport.equality(
            f"superadditivity.{label}", lhs, rhs, cfg.exact_tolerance(rhs), h
        )
    if not strict:
        return CheckReport.at_least(
            f"superadditivity.{label}", lhs, rhs, cfg.exact_tolerance(rhs), h
        )

    profiles = (u, v, phi, psi)
    if not all(isinstance(f, Profile) for f in profiles):
        return CheckReport.inconclusive(
            f"superadditivity.{label}", h, "strict claim needs profiles for refinement"
        )
    fine_lhs, fine_rhs = _superadditivity_sides(*_sample_quadruple(profiles, h / 2.0), spec)
    return CheckReport.strictly_greater(
        f"superadditivity.{label}",
        lhs,
        rhs,
        cfg.strict_tolerance(h, rhs),
        h,
        fine_lhs - fine_rhs,
    )


def _energy_tolerance(flowcfg: FlowConfig, cfg: SuiteConfig, scale: float) -> float:
    return 3.0 * flowcfg.energy_tol + cfg.exact_tolerance(scale)


def _inconclusive_all(check_ids: Sequence[str], h: float, reason: str) -> List[CheckReport]:
    return [CheckReport.inconclusive(check_id, h, reason) for check_id in check_ids]


def _not_converged(results: Sequence[MinimizeResult]) -> Optional[str]:
    for result in results:
        if not result.converged:
            return f"minimization at masses {list(result.masses)} ended {result.diagnosis.value}"
    return None


def _scalar_level(
    spec: NonlinearitySpec, alpha: float, beta: float, grid: Grid, flowcfg: FlowConfig
) -> Tuple[MinimizeResult, MinimizeResult, MinimizeResult]:
    result_a = minimize_scalar(spec, ConstraintSpec(alpha), grid, flowcfg)
    result_b = minimize_scalar(spec, ConstraintSpec(beta), _partner_grid(grid), flowcfg)
    result_ab = minimize_scalar(spec, ConstraintSpec(alpha + beta), grid, flowcfg)
    return result_a, result_b, result_ab


def check_subadditivity(
    spec: NonlinearitySpec,
    alpha: float,
    beta: float,
    grid: Grid,
    flowcfg: FlowConfig,
    cfg: Optional[SuiteConfig] = None,
) -> List[CheckReport]:
    """
    The chain E_{alpha+beta} <= I[u_alpha * u_beta] < E_alpha + E_beta.

    Ground states are computed on `grid` and on its refinement; the strict
    links need positive margins on both. Any non-converged run makes every
    report inconclusive.

    Args:
        spec: Scalar nonlinearity
        alpha: First mass, positive
        beta: Second mass, positive
        grid: Starting grid for the minimizations
        flowcfg: Gradient flow parameters
        cfg: Suite configuration (tolerances)

    Returns:
        Reports with ids subadd[alpha,beta].*
    """
    cfg = cfg or SuiteConfig()
    prefix = f"subadd[{alpha:g},{beta:g}]"
    h = grid.h if isinstance(grid, Grid1D) else grid.x.h
    check_ids = [f"{prefix}.{name}" for name in ("mass", "chain.lower", "chain.strict", "strict")]
    if alpha == beta:
        check_ids += [f"{prefix}.doubling-profile", f"{prefix}.kinetic-scaling"]
    if _is_cubic_1d(spec):
        check_ids.append(f"{prefix}.closed-form")

    levels = []
    for level_grid in (grid, grid.refined()):
        results = _scalar_level(spec, alpha, beta, level_grid, flowcfg)
        reason = _not_converged(results)
        if reason is not None:
            logger.warning(f"{prefix}: {reason}; reporting inconclusive")
            return _inconclusive_all(check_ids, h, reason)
        levels.append(results)

    def chain(results: Tuple[MinimizeResult, ...]) -> Dict[str, float]:
        result_a, result_b, result_ab = results
        w = coupled_rearrangement(result_a.field, result_b.field)
        return {
            "E_a": result_a.energy.total,
            "E_b": result_b.energy.total,
            "E_ab": result_ab.energy.total,
            "I_w": scalar_energy(w, spec).total,
            "sum": fsum(np.array([result_a.energy.total, result_b.energy.total])),
        }

    coarse = chain(levels[0])
    fine = chain(levels[1])
    result_a, result_b, result_ab = levels[0]
    w = coupled_rearrangement(result_a.field, result_b.field)
    mass_rhs = alpha + beta

    reports = [
        CheckReport.equality(
            f"{prefix}.mass", _mass(w), mass_rhs, cfg.exact_tolerance(mass_rhs), h
        ),
        CheckReport.at_most(
            f"{prefix}.chain.lower",
            coarse["E_ab"],
            coarse["I_w"],
            _energy_tolerance(flowcfg, cfg, coarse["I_w"]),
            h,
            fine["I_w"] - fine["E_ab"],
        ),
        CheckReport.strictly_less(
            f"{prefix}.chain.strict",
            coarse["I_w"],
            coarse["sum"],
            cfg.strict_tolerance(h, coarse["sum"]),
            h,
            fine["sum"] - fine["I_w"],
        ),
        CheckReport.strictly_less(
            f"{prefix}.strict",
            coarse["E_ab"],
            coarse["sum"],
            cfg.strict_tolerance(h, coarse["sum"]),
            h,
            fine["sum"] - fine["E_ab"],
            {"E_a": f"{coarse['E_a']:.12g}", "E_b": f"{coarse['E_b']:.12g}"},
        ),
    ]

    if alpha == beta:
        u = result_a.field
        expected = np.interp(w.grid.centers / 2.0, u.grid.centers, u.values, left=0.0, right=0.0)
        lipschitz = float(np.max(np.abs(np.diff(u.values)))) / h
        reports.append(
            CheckReport.equality(
                f"{prefix}.doubling-profile",
                float(np.max(np.abs(w.values - expected))),
                0.0,
                h * lipschitz,
                h,
            )
        )
        kinetic_rhs = 0.25 * (result_a.energy.kinetic + result_b.energy.kinetic)
        reports.append(
            CheckReport.equality(
                f"{prefix}.kinetic-scaling",
                0.5 * dirichlet_integral(w),
                kinetic_rhs,
                cfg.gradient_tolerance(h, kinetic_rhs),
                h,
            )
        )

    if _is_cubic_1d(spec):
        errors = [
            abs(coarse[key] / cubic_soliton_energy(mass) - 1.0)
            for key, mass in (("E_a", alpha), ("E_b", beta), ("E_ab", alpha + beta))
        ]
        reports.append(
            CheckReport.equality(
                f"{prefix}.closed-form",
                max(errors),
                0.0,
                CLOSED_FORM_RTOL,
                h,
                metadata={"E_ab": f"{coarse['E_ab']:.12g}"},
            )
        )
    return reports


def check_system_subadditivity(
    spec: CoupledGSpec,
    masses: Tuple[MassPair, MassPair],
    grid: Grid,
    flowcfg: FlowConfig,
    cfg: Optional[SuiteConfig] = None,
    label: str = "pair",
) -> List[CheckReport]:
    """
    E_{m1+m2} <= J[u1 * u2, v1 * v2] < E_{m1} + E_{m2} for two mass pairs,
    and negativity of every ground-state energy.

    The chain is strict when the coupling is active or some component carries
    mass in both pairs; otherwise both sides decouple and the chain closes to
    an equality.

    Args:
        spec: Coupled potential
        masses: ((alpha, beta), (alpha', beta'))
        grid: Starting grid
        flowcfg: Gradient flow parameters
        cfg: Suite configuration
        label: Check id segment
    """
    cfg = cfg or SuiteConfig()
    (m1, m2) = masses
    m12 = (m1[0] + m2[0], m1[1] + m2[1])
    prefix = f"system-subadd.{label}"
    h = grid.h if isinstance(grid, Grid1D) else grid.x.h
    strict_expected = spec.beta > 0 or (m1[0] > 0 and m2[0] > 0) or (m1[1] > 0 and m2[1] > 0)
    names = ["chain.lower", "negative"]
    names += ["chain.strict", "strict"] if strict_expected else ["decoupled", "chain.upper"]
    check_ids = [f"{prefix}.{name}" for name in names]

    levels = []
    for level_grid in (grid, grid.refined()):
        results = (
            minimize_system(spec, ConstraintSpec(*m1), level_grid, flowcfg),
            minimize_system(spec, ConstraintSpec(*m2), _partner_grid(level_grid), flowcfg),
            minimize_system(spec, ConstraintSpec(*m12), level_grid, flowcfg),
        )
        reason = _not_converged(results)
        if reason is not None:
            logger.warning(f"{prefix}: {reason}; reporting inconclusive")
            return _inconclusive_all(check_ids, h, reason)
        levels.append(results)

    def chain(results: Tuple[MinimizeResult, ...]) -> Dict[str, float]:
        first, second, joint = results
        w_u = coupled_rearrangement(first.fields[0], second.fields[0])
        w_v = coupled_rearrangement(first.fields[1], second.fields[1])
        return {
            "E_1": first.energy.total,
            "E_2": second.energy.total,
            "E_12": joint.energy.total,
            "J_w": system_energy(w_u, w_v, spec).total,
            "sum": fsum(np.array([first.energy.total, second.energy.total])),
        }

    coarse = chain(levels[0])
    fine = chain(levels[1])
    tolerance = _energy_tolerance(flowcfg, cfg, coarse["sum"])
    worst_coarse = max(coarse["E_1"], coarse["E_2"], coarse["E_12"])
    worst_fine = max(fine["E_1"], fine["E_2"], fine["E_12"])
    metadata = {"masses": f"{m1};{m2}", "E_12": f"{coarse['E_12']:.12g}"}

    reports = [
        CheckReport.at_most(
            f"{prefix}.chain.lower",
            coarse["E_12"],
            coarse["J_w"],
            tolerance,
            h,
            fine["J_w"] - fine["E_12"],
            metadata,
        ),
        CheckReport.strictly_less(
            f"{prefix}.negative", worst_coarse, 0.0, 0.0, h, -worst_fine, metadata
        ),
    ]
    if strict_expected:
        reports += [
            CheckReport.strictly_less(
                f"{prefix}.chain.strict",
                coarse["J_w"],
                coarse["sum"],
                cfg.strict_tolerance(h, coarse["sum"]),
                h,
                fine["sum"] - fine["J_w"],
                metadata,
            ),
            CheckReport.strictly_less(
                f"{prefix}.strict",
                coarse["E_12"],
                coarse["sum"],
                cfg.strict_tolerance(h, coarse["sum"]),
                h,
                fine["sum"] - fine["E_12"],
                metadata,
            ),
        ]
    else:
        reports += [
            CheckReport.equality(
                f"{prefix}.decoupled",
                coarse["E_12"],
                coarse["sum"],
                max(tolerance, 1e-9 * abs(coarse["sum"])),
                h,
                metadata,
            ),
            CheckReport.at_most(
                f"{prefix}.chain.upper",
                coarse["J_w"],
                coarse["sum"],
                max(tolerance, 1e-9 * abs(coarse["sum"])),
                h,
                metadata=metadata,
            ),
        ]
    return reports


def _random_coercivity_field(
    rng: np.random.Generator, mass: float, h: float, half_width: float
) -> Field1D:
    if rng.random() < 0.5:
        profile = bump_sum(rng, half_width)
    else:
        # Narrow Gaussians push the kinetic energy up
        scale = float(np.exp(rng.uniform(np.log(0.05), np.log(2.0))))
        profile = gaussian(scale=scale, half_width=half_width)
    u = profile.sample(h)
    current = _mass(u)
    return u.with_values(u.values * math.sqrt(mass / current)) if current > 0 else u


def check_coercivity(
    spec: Union[NonlinearitySpec, CoupledGSpec],
    R: float,
    count: int,
    rng: np.random.Generator,
    cfg: SuiteConfig,
) -> List[CheckReport]:
    """
    Randomized validation of 1/4 int |grad u|^2 <= energy + C(R) on 1D fields
    with masses in (0, R], plus monotonicity of C in R.
    """
    C = coercivity_bound(spec, R)
    system = isinstance(spec, CoupledGSpec)
    check_id = f"coercivity.{'system' if system else 'scalar'}"
    reports = [
        CheckReport.at_most(
            f"{check_id}.monotone-in-R", C, coercivity_bound(spec, 2.0 * R), 0.0, cfg.h
        )
    ]
    for _ in range(count):
        masses = rng.uniform(0.05, 1.0, 2) * R
        u = _random_coercivity_field(rng, masses[0], cfg.h, cfg.domain_half_width)
        if system:
            v = _random_coercivity_field(rng, masses[1], cfg.h, cfg.domain_half_width)
            energy = system_energy(u, v, spec).total
            lhs = 0.25 * fsum(np.array([dirichlet_integral(u), dirichlet_integral(v)]))
        else:
            energy = scalar_energy(u, spec).total
            lhs = 0.25 * dirichlet_integral(u)
        rhs = energy + C
        reports.append(
            CheckReport.at_most(
                check_id,
                lhs,
                rhs,
                cfg.exact_tolerance(lhs),
                cfg.h,
                metadata={"C": f"{C:.6g}", "R": f"{R:g}"},
            )
        )
    return reports


def check_energy_curve(
    spec: NonlinearitySpec,
    alphas: Sequence[float],
    grid: Grid,
    flowcfg: FlowConfig,
    cfg: SuiteConfig,
) -> List[CheckReport]:
    """
    Negativity, strict decrease and subadditivity of alpha -> E_alpha over a sweep,
    agreement with -alpha^3/96 for the 1D cubic case, and shrinking gaps under
    mass perturbation.
    """
    h = grid.h if isinstance(grid, Grid1D) else grid.x.h
    curve = energy_curve_sweep(spec, alphas, grid, flowcfg)
    check_ids = [
        "energy-curve.negative",
        "energy-curve.decreasing",
        "energy-curve.subadditive",
        "energy-curve.continuity",
    ]
    if _is_cubic_1d(spec):
        check_ids.append("energy-curve.closed-form")
    if not bool(curve["converged"].all()):
        failed = curve.loc[~curve["converged"], "alpha"].tolist()
        return _inconclusive_all(check_ids, h, f"sweep did not converge at alpha={failed}")

    energies = dict(zip(curve["alpha"].tolist(), curve["energy"].tolist()))
    values = curve["energy"].to_numpy()
    tolerance = 3.0 * flowcfg.energy_tol
    reports = [
        CheckReport.at_most(
            "energy-curve.negative",
            float(values.max()),
            -tolerance,
            0.0,
            h,
            metadata={"points": len(values)},
        )
    ]
    steps = np.diff(values)
    reports.append(
        CheckReport.at_most(
            "energy-curve.decreasing",
            float(steps.max()) if steps.size else -tolerance,
            -tolerance,
            0.0,
            h,
        )
    )

    keys = {round(a, 12): a for a in energies}
    for i, a in enumerate(energies):
        for b in list(energies)[i:]:
            total = keys.get(round(a + b, 12))
            if total is None:
                continue
            rhs = energies[a] + energies[b]
            reports.append(
                CheckReport.at_most(
                    "energy-curve.subadditive",
                    energies[total],
                    rhs,
                    tolerance,
                    h,
                    metadata={"pair": f"{a:g}+{b:g}"},
                )
            )
    if not any(r.check_id == "energy-curve.subadditive" for r in reports):
        reports.append(
            CheckReport.skipped(
                "energy-curve.subadditive",
                h,
                "no pair of masses sums to another",
                CheckKind.NON_STRICT,
            )
        )

    if _is_cubic_1d(spec):
        errors = [abs(e / cubic_soliton_energy(a) - 1.0) for a, e in energies.items()]
        reports.append(
            CheckReport.equality("energy-curve.closed-form", max(errors), 0.0, CLOSED_FORM_RTOL, h)
        )

    probe = continuity_probe(spec, float(alphas[0]), [0.05, 0.1], grid, flowcfg)
    gaps = probe["gap"].tolist()
    reports.append(
        CheckReport.at_most(
            "energy-curve.continuity",
            gaps[0],
            gaps[1],
            tolerance,
            h,
            metadata={"deltas": "0.05,0.1"},
        )
    )
    return reports
