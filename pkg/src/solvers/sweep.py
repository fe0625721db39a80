"""
Energy-curve sweeps alpha -> E_alpha with warm starts.
"""

import math
import sys
from dataclasses import replace
from typing import Any, Optional, Sequence

import numpy as np
import pandas as pd
from loguru import logger
from tqdm import tqdm

from ..core.exceptions import DomainError
from ..functionals.nonlinearity import NonlinearitySpec
from ..functionals.scalar_functional import ScalarFunctional
from .gradient_flow import (
    ConstraintSpec,
    FlowConfig,
    Grid,
    InitialState,
    MinimizeResult,
    auto_sized_grid,
    minimize_scalar,
)

SWEEP_COLUMNS = [
    "alpha",
    "energy",
    "kinetic",
    "potential",
    "multiplier",
    "residual",
    "iterations",
    "converged",
    "diagnosis",
]


def _row(alpha: float, result: MinimizeResult) -> dict:
    return {
        "alpha": alpha,
        "energy": result.energy.total,
        "kinetic": result.energy.kinetic,
        "potential": result.energy.potential,
        "multiplier": result.multiplier,
        "residual": result.residuals[0],
        "iterations": result.iterations,
        "converged": result.converged,
        "diagnosis": result.diagnosis.value,
    }


def energy_curve_sweep(
    spec: NonlinearitySpec,
    alphas: Sequence[float],
    grid: Grid,
    cfg: Optional[FlowConfig] = None,
    progress: bool = False,
) -> pd.DataFrame:
    """
    Minimize at every mass of an increasing list on one shared grid.

    The grid is sized for the smallest mass (the widest ground state); every run
    after the first starts from the previous minimizer rescaled to the new mass.

    Args:
        spec: Scalar nonlinearity
        alphas: Strictly increasing positive masses
        grid: Starting grid
        cfg: Flow parameters
        progress: Show a tqdm progress bar on stderr

    Returns:
        DataFrame with one row per mass, columns SWEEP_COLUMNS
    """
    masses = np.asarray(alphas, dtype=float).ravel()
    if masses.size == 0:
        raise DomainError("sweep needs at least one mass")
    if np.any(masses <= 0) or np.any(np.diff(masses) <= 0):
        raise DomainError("sweep masses must be positive and strictly increasing")

    cfg = cfg or FlowConfig()
    shared = auto_sized_grid(grid, ScalarFunctional(spec).width_hint((masses[0],)), cfg)

    rows = []
    previous: Optional[MinimizeResult] = None
    for alpha in tqdm(masses.tolist(), desc="energy curve", disable=not progress, file=sys.stderr):
        run_cfg = cfg
        if previous is not None:
            scale = math.sqrt(alpha / previous.masses[0])
            warm = previous.field.with_values(previous.field.values * scale)
            run_cfg = replace(cfg, init=InitialState.GIVEN, initial_fields=(warm,))
        result = minimize_scalar(spec, ConstraintSpec(alpha), shared, run_cfg)
        rows.append(_row(alpha, result))
        previous = result
        logger.debug(f"Sweep point alpha={alpha:g}: E={result.energy.total:.12g}")

    return pd.DataFrame(rows, columns=SWEEP_COLUMNS)


def continuity_probe(
    spec: NonlinearitySpec,
    alpha: float,
    deltas: Sequence[float],
    grid: Grid,
    cfg: Optional[FlowConfig] = None,
) -> pd.DataFrame:
    """
    |E(alpha + delta) - E(alpha)| for each delta, all runs on the same grid.

    Returns:
        DataFrame with columns delta, gap
    """
    deltas = sorted(float(d) for d in deltas)
    if not deltas or deltas[0] <= 0:
        raise DomainError("continuity probe needs positive deltas")
    curve = energy_curve_sweep(spec, [alpha] + [alpha + d for d in deltas], grid, cfg)
    base = float(curve["energy"].iloc[0])
    gaps: Any = (curve["energy"].iloc[1:] - base).abs().to_numpy()
    return pd.DataFrame({"delta": deltas, "gap": gaps})
