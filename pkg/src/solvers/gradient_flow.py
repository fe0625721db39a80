"""
Normalized gradient flow for mass-constrained ground states.
Pseudo-time descent steps alternate with exact renormalization onto the mass constraints.
"""

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from loguru import logger
from scipy import sparse
from scipy.linalg import solve_banded
from scipy.sparse.linalg import spsolve

from ..core.exceptions import (
    DegenerateConstraintError,
    DivergenceError,
    DomainError,
    GridMismatchError,
)
from ..core.grid import (
    Field,
    Field1D,
    Field2D,
    Grid1D,
    Grid2D,
    integrate,
    interpolate_onto,
    laplacian,
    lp_norm,
)
from ..functionals.base_functional import BaseFunctional
from ..functionals.energy import EnergyValue
from ..functionals.nonlinearity import CoupledGSpec, NonlinearitySpec
from ..functionals.scalar_functional import ScalarFunctional
from ..functionals.system_functional import SystemFunctional

Grid = Union[Grid1D, Grid2D]

# e^{-b x} falls below 1e-12 of its peak at half of this many decay lengths.
DECAY_LENGTHS = 2.0 * math.log(2e12)
BOUNDARY_FRACTION = 0.05
BOUNDARY_MASS_RTOL = 1e-10
SPREADING_PEAK_RATIO = 1e-6


class FlowScheme(Enum):
    """Pseudo-time discretization."""

    EXPLICIT = "explicit"
    SEMI_IMPLICIT = "semi-implicit"


class InitialState(Enum):
    """Initial iterate of the flow."""

    GAUSSIAN = "gaussian"
    GIVEN = "given-file"
    RANDOM = "random-seeded"


class FlowDiagnosis(Enum):
    """How a run ended."""

    CONVERGED = "converged"
    MAX_ITER = "max-iter"
    SPREADING = "spreading"


@dataclass(frozen=True)
class ConstraintSpec:
    """Mass constraints ||u||^2 = alpha (and ||v||^2 = beta for systems)."""

    alpha: float
    beta: float = 0.0

    def __post_init__(self):
        for name in ("alpha", "beta"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0):
                raise DomainError(f"mass {name} must be finite and non-negative, got {value}")

    @property
    def masses(self) -> Tuple[float, float]:
        return (self.alpha, self.beta)

    def require_scalar(self) -> None:
        if self.alpha == 0:
            raise DegenerateConstraintError("scalar minimization needs alpha > 0")

    def require_system(self) -> None:
        if self.alpha == 0 and self.beta == 0:
            raise DegenerateConstraintError("system minimization needs (alpha, beta) != (0, 0)")


@dataclass
class FlowConfig:
    """
    Gradient flow parameters.

    tau=None lets the semi-implicit scheme pick theta / max(f(u)/u) each step
    (capped by tau_max); the explicit scheme then uses 90% of its stability limit.
    """

    tau: Optional[float] = None
    max_iter: int = 5000
    energy_tol: float = 1e-12
    residual_tol: float = 1e-8
    scheme: FlowScheme = FlowScheme.SEMI_IMPLICIT
    init: InitialState = InitialState.GAUSSIAN
    seed: int = 0
    theta: float = 0.5
    tau_max: float = 100.0
    burn_in: int = 10
    auto_domain: bool = True
    max_domain_doublings: int = 2
    initial_fields: Optional[Tuple[Field, ...]] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.scheme = FlowScheme(self.scheme)
        self.init = InitialState(self.init)
        if self.tau is not None and not self.tau > 0:
            raise DomainError(f"tau must be positive, got {self.tau}")
        if self.max_iter < 1:
            raise DomainError(f"max_iter must be at least 1, got {self.max_iter}")
        if not 0 < self.theta < 1:
            raise DomainError(f"theta must lie in (0, 1), got {self.theta}")
        if self.energy_tol <= 0 or self.residual_tol <= 0 or self.tau_max <= 0:
            raise DomainError("tolerances and tau_max must be positive")
        if self.init is InitialState.GIVEN and not self.initial_fields:
            raise DomainError("init 'given-file' needs initial_fields")

    @staticmethod
    def stability_limit(grid: Grid) -> float:
        """Largest explicit step: h^2 / (2 * dim)."""
        if isinstance(grid, Grid1D):
            return grid.h * grid.h / 2.0
        h = min(grid.x.h, grid.y.h)
        return h * h / 4.0

    def validate_for(self, grid: Grid) -> None:
        if self.scheme is FlowScheme.EXPLICIT and self.tau is not None:
            limit = self.stability_limit(grid)
            if self.tau >= limit:
                raise DomainError(f"explicit tau={self.tau} exceeds stability limit {limit:.3g}")

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "FlowConfig":
        known = {f for f in cls.__dataclass_fields__ if f != "initial_fields"}
        return cls(**{k: v for k, v in data.items() if k in known})

    def to_dict(self) -> Dict[str, Any]:
        return {
            "tau": self.tau,
            "max_iter": self.max_iter,
            "energy_tol": self.energy_tol,
            "residual_tol": self.residual_tol,
            "scheme": self.scheme.value,
            "init": self.init.value,
            "seed": self.seed,
            "theta": self.theta,
            "tau_max": self.tau_max,
            "burn_in": self.burn_in,
            "auto_domain": self.auto_domain,
            "max_domain_doublings": self.max_domain_doublings,
        }


@dataclass
class MinimizeResult:
    """Outcome of a minimization run."""

    fields: Tuple[Field, ...]
    masses: Tuple[float, ...]
    energy: EnergyValue
    multipliers: Tuple[float, ...]
    residuals: Tuple[float, ...]
    iterations: int
    converged: bool
    monotone_energy: bool
    diagnosis: FlowDiagnosis
    grid: Grid
    energy_history: List[float] = field(default_factory=list, repr=False)
    energy_evaluations: int = 0

    @property
    def field(self) -> Field:
        return self.fields[0]

    @property
    def multiplier(self) -> float:
        return self.multipliers[0]

    def to_dict(self, include_history: bool = False) -> Dict[str, Any]:
        data = {
            "energy": self.energy.to_dict(),
            "masses": list(self.masses),
            "multipliers": list(self.multipliers),
            "residuals": list(self.residuals),
            "iterations": self.iterations,
            "converged": self.converged,
            "monotone_energy": self.monotone_energy,
            "diagnosis": self.diagnosis.value,
            "grid": self.grid.to_dict(),
            "energy_evaluations": self.energy_evaluations,
        }
        if include_history:
            data["energy_history"] = list(self.energy_history)
        return data


def boundary_mass(u: Field) -> float:
    """Mass carried by the outermost 5% of cells along every axis."""
    mask = np.zeros(u.shape, dtype=bool)
    for axis, n in enumerate(u.shape):
        k = max(1, int(BOUNDARY_FRACTION * n))
        index = [slice(None)] * u.ndim
        index[axis] = np.r_[0:k, n - k : n]
        mask[tuple(index)] = True
    return integrate(u, np.where(mask, u.values**2, 0.0))


def auto_sized_grid(grid: Grid, width_hint: float, cfg: FlowConfig) -> Grid:
    """
    Enlarge a 1D grid to length DECAY_LENGTHS / b, keeping h and the cell-count parity.
    2D grids are used as given.
    """
    if not cfg.auto_domain or isinstance(grid, Grid2D):
        return grid
    needed = DECAY_LENGTHS / width_hint
    if grid.length >= needed:
        return grid
    n = int(math.ceil(needed / grid.h))
    if n % 2 != grid.n % 2:
        n += 1
    logger.debug(f"Auto-sizing domain from L={grid.length:.4g} to L={n * grid.h:.4g}")
    return Grid1D.centered(n, grid.h)


class NormalizedGradientFlow:
    """
    Normalized gradient flow on a fixed grid.

    Features:
    - Semi-implicit steps (I - tau Lap - tau diag(f(u)/u)) u_new = u, then renormalization
    - Explicit steps u + tau (Lap u + f(u)) below the h^2 stability limit
    - Adaptive step size bounded by the frozen potential
    - Zero-mass components stay identically zero
    - Spreading diagnosis for infima that are not attained
    """

    def __init__(self, functional: BaseFunctional, config: Optional[FlowConfig] = None):
        self.functional = functional
        self.config = config or FlowConfig()
        self._laplacians: Dict[Grid2D, sparse.csr_matrix] = {}

    def run(self, masses: Sequence[float], grid: Grid) -> MinimizeResult:
        """
        Descend from the configured initial state.

        Args:
            masses: One mass per component
            grid: Grid the fields live on

        Returns:
            MinimizeResult with the final iterate and its diagnostics
        """
        masses = tuple(float(m) for m in masses)
        self.config.validate_for(grid)
        fields = self._initial_fields(masses, grid)
        return self._descend(fields, masses, grid)

    def _initial_fields(self, masses: Tuple[float, ...], grid: Grid) -> List[Field]:
        cfg = self.config
        zeros = Field1D.zeros if isinstance(grid, Grid1D) else Field2D.zeros
        fields: List[Field] = []
        for j, mass in enumerate(masses):
            if mass <= 0:
                fields.append(zeros(grid))
                continue
            if cfg.init is InitialState.GIVEN:
                start = self._given_field(cfg.initial_fields[j], grid)
            elif cfg.init is InitialState.RANDOM:
                start = self._random_field(grid, np.random.default_rng([cfg.seed, j]))
            else:
                start = self._gaussian_field(grid, self.functional.width_hint(masses))
            fields.append(self._renormalize(start, mass))
        return fields

    @staticmethod
    def _given_field(start: Field, grid: Grid) -> Field:
        if start.grid == grid:
            return start
        if isinstance(start, Field1D) and isinstance(grid, Grid1D):
            return interpolate_onto(start, grid)
        raise GridMismatchError("a given 2D initial field must live on the run grid")

    @staticmethod
    def _gaussian_field(grid: Grid, width_hint: float) -> Field:
        if isinstance(grid, Grid1D):
            width = min(1.0 / width_hint, grid.length / 8.0)
            return Field1D.from_function(grid, lambda x: np.exp(-0.5 * (x / width) ** 2))
        width = min(1.0 / width_hint, grid.x.length / 8.0, grid.y.length / 8.0)
        return Field2D.from_function(grid, lambda x, y: np.exp(-0.5 * (x * x + y * y) / width**2))

    @staticmethod
    def _random_field(grid: Grid, rng: np.random.Generator) -> Field:
        grids = (grid,) if isinstance(grid, Grid1D) else (grid.x, grid.y)
        spans = [g.length / 6.0 for g in grids]
        count = int(rng.integers(1, 4))
        centers = [rng.uniform(-s, s, count) for s in spans]
        widths = [rng.uniform(0.5, 1.5, count) * s for s in spans]
        heights = rng.uniform(0.5, 1.5, count)

        def bumps(*coords: np.ndarray) -> np.ndarray:
            total = np.zeros_like(coords[0])
            for k in range(count):
                exponent = sum(
                    ((c - centers[a][k]) / widths[a][k]) ** 2 for a, c in enumerate(coords)
                )
                total = total + heights[k] * np.exp(-0.5 * exponent)
            return total

        if isinstance(grid, Grid1D):
            return Field1D.from_function(grid, bumps)
        return Field2D.from_function(grid, bumps)

    @staticmethod
    def _renormalize(u: Field, mass: float) -> Field:
        norm = lp_norm(u, 2.0)
        if not norm > 0:
            raise DegenerateConstraintError("cannot renormalize a field with zero mass")
        return u.with_values(u.values * math.sqrt(mass / norm))

    def _step_size(self, weights: Sequence[np.ndarray], active: Sequence[int], grid: Grid) -> float:
        cfg = self.config
        if cfg.scheme is FlowScheme.EXPLICIT:
            return cfg.tau if cfg.tau is not None else 0.9 * cfg.stability_limit(grid)
        peak = max(float(weights[j].max()) for j in active)
        cap = cfg.theta / peak if peak > 0 else math.inf
        requested = cfg.tau if cfg.tau is not None else cfg.tau_max
        return min(requested, cfg.tau_max, cap)

    def _laplacian_matrix(self, grid: Grid2D) -> sparse.csr_matrix:
        if grid not in self._laplacians:

            def second_difference(axis: Grid1D) -> sparse.spmatrix:
                stencil = sparse.diags([1.0, -2.0, 1.0], [-1, 0, 1], shape=(axis.n, axis.n))
                return stencil / axis.h**2

            eye_x = sparse.identity(grid.x.n)
            eye_y = sparse.identity(grid.y.n)
            matrix = sparse.kron(second_difference(grid.x), eye_y) + sparse.kron(
                eye_x, second_difference(grid.y)
            )
            self._laplacians[grid] = matrix.tocsr()
        return self._laplacians[grid]

    def _step(self, u: Field, weight: np.ndarray, tau: float) -> np.ndarray:
        if self.config.scheme is FlowScheme.EXPLICIT:
            stepped = u.values + tau * (laplacian(u) + weight * u.values)
        elif isinstance(u, Field1D):
            c = tau / (u.h * u.h)
            bands = np.empty((3, u.grid.n))
            bands[0, :] = -c
            bands[1, :] = 1.0 + 2.0 * c - tau * weight
            bands[2, :] = -c
            stepped = solve_banded((1, 1), bands, u.values)
        else:
            size = u.values.size
            system = sparse.identity(size) - tau * (
                self._laplacian_matrix(u.grid) + sparse.diags(weight.ravel())
            )
            stepped = spsolve(system.tocsc(), u.values.ravel()).reshape(u.shape)
        return np.maximum(stepped, 0.0)

    def _descend(
        self, fields: List[Field], masses: Tuple[float, ...], grid: Grid
    ) -> MinimizeResult:
        cfg = self.config
        active = [j for j, m in enumerate(masses) if m > 0]
        initial_peak = max(float(fields[j].values.max()) for j in active)

        energy = self.functional.energy(fields)
        history = [energy.total]
        converged = False
        multipliers: List[float] = []
        residuals: List[float] = []
        iteration = 0

        logger.debug(f"{self.functional.name}: masses={masses}, E0={energy.total:.10g}")
        for iteration in range(1, cfg.max_iter + 1):
            weights = self.functional.weights(fields)
            if not all(np.all(np.isfinite(weights[j])) for j in active):
                raise DivergenceError(
                    f"non-finite potential weight at iteration {iteration}",
                    last_stable=tuple(fields),
                    iteration=iteration,
                )
            tau = self._step_size(weights, active, grid)

            stepped = list(fields)
            for j in active:
                values = self._step(fields[j], weights[j], tau)
                if not np.all(np.isfinite(values)):
                    raise DivergenceError(
                        f"non-finite iterate at iteration {iteration}",
                        last_stable=tuple(fields),
                        iteration=iteration,
                    )
                raw = fields[j].with_values(values)
                try:
                    stepped[j] = self._renormalize(raw, masses[j])
                except DegenerateConstraintError as e:
                    raise DivergenceError(
                        str(e), last_stable=tuple(fields), iteration=iteration
                    ) from e

            candidate = self.functional.energy(stepped)
            if not math.isfinite(candidate.total):
                raise DivergenceError(
                    f"non-finite energy at iteration {iteration}",
                    last_stable=tuple(fields),
                    iteration=iteration,
                )
            fields, energy = stepped, candidate
            history.append(energy.total)

            if abs(history[-1] - history[-2]) < cfg.energy_tol:
                multipliers = self.functional.multipliers(fields, masses)
                residuals = self.functional.residuals(fields, multipliers)
                if max(residuals[j] for j in active) <= cfg.residual_tol:
                    converged = True
                    break

            if iteration % 500 == 0:
                logger.debug(
                    f"{self.functional.name}: iteration {iteration}, "
                    f"E={energy.total:.12g}, tau={tau:.3g}"
                )

        if not converged:
            multipliers = self.functional.multipliers(fields, masses)
            residuals = self.functional.residuals(fields, multipliers)

        noise = 1e-12 * (energy.kinetic + abs(energy.potential))
        tail = np.diff(history[cfg.burn_in :])
        monotone = bool(np.all(tail <= noise)) if tail.size else True

        peak = max(float(fields[j].values.max()) for j in active)
        diagnosis = FlowDiagnosis.CONVERGED if converged else FlowDiagnosis.MAX_ITER
        if energy.total >= 0 or peak < SPREADING_PEAK_RATIO * initial_peak:
            converged = False
            diagnosis = FlowDiagnosis.SPREADING
        if converged and not monotone:
            logger.warning(f"{self.functional.name}: energy was not monotone after burn-in")

        stats = self.functional.get_stats()
        logger.info(
            f"{stats['name']}: {diagnosis.value} after {iteration} iterations, "
            f"{stats['evaluations']} energy evaluations, E={energy.total:.12g}"
        )
        return MinimizeResult(
            fields=tuple(fields),
            masses=masses,
            energy=energy,
            multipliers=tuple(multipliers),
            residuals=tuple(residuals),
            iterations=iteration,
            converged=converged,
            monotone_energy=monotone,
            diagnosis=diagnosis,
            grid=grid,
            energy_history=history,
            energy_evaluations=stats["evaluations"],
        )


def _leaks(result: MinimizeResult) -> bool:
    total = math.fsum(result.masses)
    return math.fsum(boundary_mass(u) for u in result.fields) > BOUNDARY_MASS_RTOL * total


def run_flow(
    functional: BaseFunctional,
    masses: Sequence[float],
    grid: Grid,
    cfg: Optional[FlowConfig] = None,
) -> MinimizeResult:
    """
    Minimize on an auto-sized grid, doubling the domain while mass reaches the boundary.
    """
    cfg = cfg or FlowConfig()
    grid = auto_sized_grid(grid, functional.width_hint(masses), cfg)
    result = NormalizedGradientFlow(functional, cfg).run(masses, grid)

    doublings = 0
    while result.diagnosis is not FlowDiagnosis.SPREADING and _leaks(result):
        if not isinstance(grid, Grid1D) or doublings >= cfg.max_domain_doublings:
            logger.warning(f"{functional.name}: mass still reaches the boundary")
            return replace(result, converged=False, diagnosis=FlowDiagnosis.SPREADING)
        grid = Grid1D.centered(2 * grid.n + grid.n % 2, grid.h)
        warm = tuple(interpolate_onto(u, grid) for u in result.fields)
        logger.info(f"{functional.name}: doubling domain to L={grid.length:.4g}")
        result = NormalizedGradientFlow(
            functional, replace(cfg, init=InitialState.GIVEN, initial_fields=warm)
        ).run(masses, grid)
        doublings += 1
    return result


def minimize_scalar(
    spec: NonlinearitySpec, c: ConstraintSpec, grid: Grid, cfg: Optional[FlowConfig] = None
) -> MinimizeResult:
    """
    Ground state of I[u] on the mass sphere ||u||^2 = alpha.

    Args:
        spec: Scalar nonlinearity
        c: Constraint; alpha must be positive
        grid: Starting grid (1D grids are enlarged when too short)
        cfg: Flow parameters

    Returns:
        MinimizeResult with one field and its multiplier mu
    """
    c.require_scalar()
    return run_flow(ScalarFunctional(spec), (c.alpha,), grid, cfg)


def minimize_system(
    spec: CoupledGSpec, c: ConstraintSpec, grid: Grid, cfg: Optional[FlowConfig] = None
) -> MinimizeResult:
    """Ground state of J[u, v] with ||u||^2 = alpha, ||v||^2 = beta."""
    c.require_system()
    return run_flow(SystemFunctional(spec), c.masses, grid, cfg)
