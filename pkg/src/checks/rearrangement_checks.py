"""
Checks for rearrangement identities and gradient inequalities.

Exact-class checks compare value multisets and fsum integrals; approximate-class
checks compare finite-difference gradient integrals with tolerances scaled by h.
"""

import logging
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..core.grid import (
    Field,
    Field1D,
    Field2D,
    distribution_profile,
    fsum,
    gradient_seminorm,
    lp_norm,
    pad_cells,
    quadrature_phi,
    shift_cells,
)
from ..core.rearrange import (
    MultiplicityQuery,
    coupled_rearrangement,
    interpolant_rearrangement,
    level_bands,
    multiplicity,
    schwarz_rearrangement,
    steiner_rearrangement,
    symmetric_rearrangement_1d,
    truncate_shift,
)
from ..functionals.energy import dirichlet_integral
from .profiles import Profile
from .report import CheckReport, SuiteConfig

logger = logging.getLogger(__name__)

# Monotone Phi with Phi(0) = 0 used for integral preservation
PHI_FUNCTIONS = {
    "cube": lambda s: s**3,
    "power1.5": lambda s: s**1.5,
    "cube-minus-square": lambda s: s**3 - 2.0 * s**2,
}

# Relative tolerance of the band-sum comparisons
BAND_RTOL = 1e-9

FieldOrProfile = Union[Field, Profile]


class Expectation(Enum):
    """What the multiplicity-weighted comparison is expected to show."""

    BOUND = "bound"
    EQUALITY = "equality"
    STRICT = "strict"


def _p_tag(p: float) -> str:
    return f"p={p:g}"


def _max_abs_diff(a: np.ndarray, b: np.ndarray) -> float:
    if a.shape != b.shape:
        return float("inf")
    return float(np.max(np.abs(a - b))) if a.size else 0.0


def _sorted_diff(u: Field, w: Field) -> float:
    return _max_abs_diff(np.sort(u.values.ravel()), np.sort(w.values.ravel()))


def _gradient_defect(star: Field, u: Field, p: float, axis: int) -> float:
    return max(0.0, gradient_seminorm(star, p, axis) - gradient_seminorm(u, p, axis))


def check_steiner_properties(
    u: Field2D, p_list: Sequence[float], cfg: SuiteConfig, refined: Optional[Field2D] = None
) -> List[CheckReport]:
    """
    Equimeasurability, Phi-integral and L^p preservation, and per-axis gradient
    contraction of the Steiner rearrangement.

    Args:
        u: Non-negative field
        p_list: Gradient and L^p exponents
        cfg: Suite configuration (tolerances)
        refined: The same field sampled at h/2; adds refinement margins and
            defect-refinement reports

    Returns:
        List of CheckReport
    """
    star = steiner_rearrangement(u)
    h = u.spacing(0)
    reports = [CheckReport.equality("steiner.equimeasurable", _sorted_diff(u, star), 0.0, 0.0, h)]

    for name, phi in PHI_FUNCTIONS.items():
        rhs = quadrature_phi(u, phi)
        reports.append(
            CheckReport.equality(
                f"steiner.phi.{name}",
                quadrature_phi(star, phi),
                rhs,
                cfg.exact_tolerance(rhs),
                h,
            )
        )

    fine_star = steiner_rearrangement(refined) if refined is not None else None
    for p in p_list:
        rhs = lp_norm(u, p)
        reports.append(
            CheckReport.equality(
                f"steiner.lp.{_p_tag(p)}", lp_norm(star, p), rhs, cfg.exact_tolerance(rhs), h
            )
        )
        for axis in range(u.ndim):
            check_id = f"steiner.gradient.axis{axis}.{_p_tag(p)}"
            lhs = gradient_seminorm(star, p, axis)
            rhs = gradient_seminorm(u, p, axis)
            fine_margin = None
            if refined is not None:
                fine_margin = gradient_seminorm(refined, p, axis) - gradient_seminorm(
                    fine_star, p, axis
                )
                coarse_defect = _gradient_defect(star, u, p, axis)
                fine_defect = _gradient_defect(fine_star, refined, p, axis)
                reports.append(
                    CheckReport.at_most(
                        f"steiner.defect-refinement.axis{axis}.{_p_tag(p)}",
                        fine_defect,
                        coarse_defect,
                        cfg.exact_tolerance(rhs),
                        h,
                    )
                )
            reports.append(
                CheckReport.at_most(
                    check_id, lhs, rhs, cfg.gradient_tolerance(h, rhs), h, fine_margin
                )
            )
    return reports


def check_schwarz_contraction(u: Field2D, cfg: SuiteConfig) -> List[CheckReport]:
    """Equimeasurability and Dirichlet-integral contraction of the lattice Schwarz rearrangement."""
    star = schwarz_rearrangement(u)
    h = max(u.hx, u.hy)
    rhs = dirichlet_integral(u)
    return [
        CheckReport.equality("schwarz.equimeasurable", _sorted_diff(u, star), 0.0, 0.0, h),
        CheckReport.at_most(
            "schwarz.dirichlet",
            dirichlet_integral(star),
            rhs,
            5.0 * h * abs(rhs),
            h,
            metadata={"grid": f"{u.nx}x{u.ny}"},
        ),
    ]


def check_coupled_identities(
    u: Field1D, v: Field1D, s: float, shifts: Tuple[int, int], cfg: SuiteConfig
) -> List[CheckReport]:
    """
    Translation invariance, the disjoint-support identity and the truncation
    identity of the coupled rearrangement; all three are bit-exact.

    Args:
        u: Non-negative field
        v: Non-negative field on the same spacing
        s: Truncation height
        shifts: Cell shifts applied to u and v; supports must stay on their grids
        cfg: Suite configuration
    """
    h = u.grid.h
    base = coupled_rearrangement(u, v)
    moved = coupled_rearrangement(shift_cells(u, shifts[0]), shift_cells(v, shifts[1]))
    reports = [
        CheckReport.equality(
            "coupled.translation",
            _max_abs_diff(moved.values, base.values),
            0.0,
            0.0,
            h,
            metadata={"shifts": f"{shifts[0]},{shifts[1]}"},
        )
    ]

    if u.grid != v.grid:
        reports.append(
            CheckReport.skipped("coupled.disjoint-union", h, "fields on different grids")
        )
    elif np.any((u.values > 0) & (v.values > 0)):
        reports.append(CheckReport.skipped("coupled.disjoint-union", h, "supports overlap"))
    else:
        union = pad_cells(u.with_values(u.values + v.values), base.grid.n)
        symmetric = symmetric_rearrangement_1d(union)
        reports.append(
            CheckReport.equality(
                "coupled.disjoint-union",
                _max_abs_diff(symmetric.values, base.values),
                0.0,
                0.0,
                h,
            )
        )

    truncated = coupled_rearrangement(truncate_shift(u, s), truncate_shift(v, s))
    reports.append(
        CheckReport.equality(
            "coupled.truncation",
            _max_abs_diff(truncated.values, truncate_shift(base, s).values),
            0.0,
            0.0,
            h,
            metadata={"s": f"{s:.6g}"},
        )
    )
    return reports


def check_additivity(
    u: Field1D,
    v: Field1D,
    p_list: Sequence[float],
    cfg: SuiteConfig,
    rng: Optional[np.random.Generator] = None,
) -> List[CheckReport]:
    """
    Distribution functions, L^p and Phi integrals of u * v are the sums of those of u and v.

    Levels are 64 draws in (0, max); L^p and Phi sums are compared to exact_rtol.
    """
    h = u.grid.h
    rng = rng or np.random.default_rng(cfg.seed)
    w = coupled_rearrangement(u, v)

    top = float(w.values.max()) if w.values.size else 0.0
    levels = np.unique(rng.uniform(0.0, top, 64)) if top > 0 else np.empty(0)
    levels = levels[levels > 0]
    counts_w = distribution_profile(w, levels).cell_counts
    counts_sum = distribution_profile(u, levels).cell_counts + distribution_profile(
        v, levels
    ).cell_counts
    mismatch = int(np.max(np.abs(counts_w - counts_sum))) if levels.size else 0
    reports = [
        CheckReport.equality(
            "additivity.distribution", mismatch, 0.0, 0.0, h, metadata={"levels": levels.size}
        )
    ]

    for p in p_list:
        rhs = fsum(np.array([lp_norm(u, p), lp_norm(v, p)]))
        reports.append(
            CheckReport.equality(
                f"additivity.lp.{_p_tag(p)}", lp_norm(w, p), rhs, cfg.exact_tolerance(rhs), h
            )
        )
    for name, phi in PHI_FUNCTIONS.items():
        rhs = fsum(np.array([quadrature_phi(u, phi), quadrature_phi(v, phi)]))
        reports.append(
            CheckReport.equality(
                f"additivity.phi.{name}",
                quadrature_phi(w, phi),
                rhs,
                cfg.exact_tolerance(rhs),
                h,
            )
        )
    return reports


def check_doubling_profile(profile: Profile, h: float) -> CheckReport:
    """
    u * u with the partner sampled on the staggered grid reproduces u(x/2)
    to within h times the Lipschitz constant of u.
    """
    u = profile.sample(h)
    w = coupled_rearrangement(u, profile.sample(h, staggered=True))
    expected = profile(w.grid.centers / 2.0)
    lipschitz = float(np.max(np.abs(np.diff(u.values)))) / h if u.grid.n > 1 else 0.0
    return CheckReport.equality(
        "additivity.doubling-profile",
        _max_abs_diff(w.values, expected),
        0.0,
        h * lipschitz,
        h,
        metadata={"profile": profile.name},
    )


def strict_qualification(f: Field) -> Tuple[bool, str]:
    """
    Whether f is positive, even in x1 and non-increasing in |x1| on every line.

    Returns:
        (qualifies, reason) where reason names the first failed condition
    """
    values = f.values
    scale = float(np.max(values)) if values.size else 0.0
    if not np.all(values > 0):
        return False, "not positive"
    if not np.allclose(values, values[::-1], rtol=0.0, atol=1e-12 * scale):
        return False, "not even in x1"
    n = values.shape[0]
    right = values[n // 2 :]
    if np.any(np.diff(right, axis=0) > 1e-12 * scale):
        return False, "not non-increasing in |x1|"
    return True, "qualifies"


def _sample_pair(u: FieldOrProfile, v: FieldOrProfile, h: float) -> Tuple[Field, Field]:
    fu = u.sample(h) if isinstance(u, Profile) else u
    fv = v.sample(h, staggered=True) if isinstance(v, Profile) else v
    return fu, fv


def _gradient_sides(u: Field, v: Field, p: float, axis: int) -> Tuple[float, float]:
    w = coupled_rearrangement(u, v)
    lhs = gradient_seminorm(w, p, axis)
    rhs = fsum(np.array([gradient_seminorm(u, p, axis), gradient_seminorm(v, p, axis)]))
    return lhs, rhs


def check_gradient_inequality(
    u: FieldOrProfile,
    v: FieldOrProfile,
    p_list: Sequence[float],
    cfg: SuiteConfig,
    h: Optional[float] = None,
    label: str = "pair",
) -> List[CheckReport]:
    """
    Per-axis gradient contraction of the coupled rearrangement, plus the strict
    variant along x1 for qualifying inputs.

    Profiles are sampled at h and h/2 (the second argument on the staggered
    grid); plain fields are checked at their own spacing only, so their strict
    claims are downgraded to non-strict.

    Args:
        u: First field or profile
        v: Second field or profile
        p_list: Exponents
        cfg: Suite configuration
        h: Sampling spacing for profiles (cfg.h when None)
        label: Check id segment naming the input family
    """
    h = h or cfg.h
    refinable = isinstance(u, Profile) and isinstance(v, Profile)
    fu, fv = _sample_pair(u, v, h)
    fine = _sample_pair(u, v, h / 2.0) if refinable else None
    spacing = fu.spacing(0)

    qualifies_u, reason_u = strict_qualification(fu)
    qualifies_v, reason_v = strict_qualification(fv)
    strict = refinable and qualifies_u and qualifies_v
    if strict:
        note = "strict"
    elif not refinable:
        note = "downgraded: no refinement available"
    else:
        note = f"downgraded: {reason_u if not qualifies_u else reason_v}"

    reports = []
    for p in p_list:
        for axis in range(fu.ndim):
            lhs, rhs = _gradient_sides(fu, fv, p, axis)
            fine_margin = None
            metadata: Dict[str, str] = {}
            if fine is not None:
                fine_lhs, fine_rhs = _gradient_sides(fine[0], fine[1], p, axis)
                fine_margin = fine_rhs - fine_lhs
                reports.append(
                    CheckReport.at_most(
                        f"gradient.{label}.defect-refinement.axis{axis}.{_p_tag(p)}",
                        max(0.0, fine_lhs - fine_rhs),
                        max(0.0, lhs - rhs),
                        cfg.exact_tolerance(rhs),
                        spacing,
                    )
                )
            if axis == 0:
                metadata["strict"] = note
            reports.append(
                CheckReport.at_most(
                    f"gradient.{label}.axis{axis}.{_p_tag(p)}",
                    lhs,
                    rhs,
                    cfg.gradient_tolerance(spacing, rhs),
                    spacing,
                    fine_margin,
                    metadata,
                )
            )
            if strict and axis == 0:
                reports.append(
                    CheckReport.strictly_less(
                        f"gradient.{label}.strict.{_p_tag(p)}",
                        lhs,
                        rhs,
                        cfg.strict_tolerance(spacing, rhs),
                        spacing,
                        fine_margin,
                        {"ratio": f"{lhs / rhs:.6g}" if rhs else "nan"},
                    )
                )
    return reports


def check_scaling_ratio(profile: Profile, h: float, expected: float = 0.25) -> CheckReport:
    """
    Dirichlet ratio of u * u against 2 * int |u'|^2; the doubling identity
    u * u = u(x/2) makes it 1/4.
    """
    lhs, rhs = _gradient_sides(profile.sample(h), profile.sample(h, staggered=True), 2.0, 0)
    return CheckReport.equality(
        "gradient.scaling-ratio",
        lhs / rhs,
        expected,
        0.02,
        h,
        metadata={"profile": profile.name},
    )


def check_multiplicity_bound(
    f: FieldOrProfile,
    p_list: Sequence[float],
    levels_seed: int,
    cfg: SuiteConfig,
    expectation: Expectation = Expectation.BOUND,
    label: str = "bound",
) -> List[CheckReport]:
    """
    int |(f#)'|^p <= int |f' / N_f(f)|^p on the interpolant of f.

    The left side is the exact gradient integral of the interpolant's decreasing
    rearrangement; the right side weights every band between sampled levels by
    its crossing count. A consistency report compares those counts with
    multiplicity() at random mid-band levels.

    Args:
        f: Non-negative field or interval profile
        p_list: Exponents, at least 1
        levels_seed: Seed of the probe-level draw
        cfg: Suite configuration
        expectation: BOUND (non-strict), EQUALITY or STRICT (sampled at h and h/2)
        label: Check id segment naming the input family
    """
    field = f.sample(cfg.h) if isinstance(f, Profile) else f
    fine = f.sample(cfg.h / 2.0) if isinstance(f, Profile) else None
    h = field.grid.h

    def sides(g: Field1D, p: float) -> Tuple[float, float]:
        return (
            interpolant_rearrangement(g).gradient_integral(p),
            level_bands(g).weighted_gradient_integral(p),
        )

    reports = []
    for p in p_list:
        check_id = f"multiplicity.{label}.{_p_tag(p)}"
        lhs, rhs = sides(field, p)
        tolerance = BAND_RTOL * abs(rhs)
        if expectation is Expectation.EQUALITY or (expectation is Expectation.STRICT and p == 1):
            # p = 1 is the coarea identity for every profile
            reports.append(CheckReport.equality(check_id, lhs, rhs, tolerance, h))
        elif expectation is Expectation.STRICT:
            if fine is None:
                reports.append(
                    CheckReport.at_most(
                        check_id,
                        lhs,
                        rhs,
                        tolerance,
                        h,
                        metadata={"strict": "downgraded: no refinement available"},
                    )
                )
                continue
            fine_lhs, fine_rhs = sides(fine, p)
            reports.append(
                CheckReport.strictly_less(
                    check_id,
                    lhs,
                    rhs,
                    cfg.strict_tolerance(h, rhs),
                    h,
                    fine_rhs - fine_lhs,
                )
            )
        else:
            reports.append(CheckReport.at_most(check_id, lhs, rhs, tolerance, h))

    reports.append(_band_count_consistency(field, levels_seed, label))
    return reports


def _band_count_consistency(f: Field1D, levels_seed: int, label: str) -> CheckReport:
    rng = np.random.default_rng(levels_seed)
    bands = level_bands(f)
    value_range = float(f.values.max() - f.values.min())
    # Bands narrower than a few perturbations cannot be probed reliably
    active = np.flatnonzero((bands.counts > 0) & (bands.widths > 4e-9 * value_range))
    check_id = f"multiplicity.{label}.band-counts"
    if active.size == 0:
        return CheckReport.skipped(check_id, f.grid.h, "constant profile")

    chosen = np.sort(rng.choice(active, size=min(16, active.size), replace=False))
    sampled = set(f.values.tolist())
    mismatches = 0
    perturbed = 0
    for k in chosen:
        level = 0.5 * (bands.lower[k] + bands.upper[k])
        if level in sampled:
            level += 1e-9 * value_range
            perturbed += 1
        if level <= 0:
            continue
        if multiplicity(f, MultiplicityQuery(level)) != bands.counts[k]:
            mismatches += 1
    return CheckReport.equality(
        check_id,
        mismatches,
        0.0,
        0.0,
        f.grid.h,
        metadata={"probes": chosen.size, "perturbed": perturbed},
    )
