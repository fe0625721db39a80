"""
Rearrangement kernels on sampled fields.
Decreasing, symmetric, Steiner, Schwarz and coupled rearrangements, plus level multiplicity.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Union

import numpy as np

from .exceptions import (
    AmbiguousLevelError,
    DomainError,
    GridMismatchError,
    UnsupportedGridError,
)
from .grid import Field, Field1D, Field2D, Grid1D, Grid2D, fsum, spacing_matches

logger = logging.getLogger(__name__)


class TieBreak(Enum):
    """Which of two cells at equal distance from the origin is filled first."""

    RIGHT_FIRST = "right-first"
    LEFT_FIRST = "left-first"


@dataclass(frozen=True)
class PlacementRule:
    """Deterministic pairing convention for symmetric placement on a grid."""

    tie_break: TieBreak = TieBreak.RIGHT_FIRST

    def order(self, n: int) -> np.ndarray:
        """Cell indices of a centered n-cell line, nearest the origin first."""
        return _line_order(n, self.tie_break)

    def radial_order(self, nx: int, ny: int) -> np.ndarray:
        """Flat (C-order) cell indices of a centered nx-by-ny grid, nearest first."""
        return _radial_order(nx, ny, self.tie_break)


DEFAULT_RULE = PlacementRule()


@lru_cache(maxsize=256)
def _line_order(n: int, tie_break: TieBreak) -> np.ndarray:
    # Twice the signed center offset, in cells; exact integers
    offset = 2 * np.arange(n) - (n - 1)
    side = -np.sign(offset) if tie_break is TieBreak.RIGHT_FIRST else np.sign(offset)
    order = np.lexsort((side, np.abs(offset)))
    order.setflags(write=False)
    return order


@lru_cache(maxsize=64)
def _radial_order(nx: int, ny: int, tie_break: TieBreak) -> np.ndarray:
    dx, dy = np.meshgrid(2 * np.arange(nx) - (nx - 1), 2 * np.arange(ny) - (ny - 1), indexing="ij")
    dx = dx.ravel()
    dy = dy.ravel()
    radius2 = dx * dx + dy * dy
    facing = dx if tie_break is TieBreak.RIGHT_FIRST else -dx
    angle = np.mod(np.arctan2(dy, facing), 2.0 * np.pi)
    order = np.lexsort((angle, np.abs(dx), radius2))
    order.setflags(write=False)
    return order


def _require_nonnegative(u: Field, name: str = "field") -> None:
    if not u.is_nonnegative():
        raise DomainError(f"{name} has negative values; take moduli before rearranging")


def _place_line(values: np.ndarray, rule: PlacementRule) -> np.ndarray:
    """Sort non-increasing and fill cells nearest the origin first (axis 0)."""
    ordered = np.sort(values, axis=0)[::-1]
    placed = np.empty_like(ordered)
    placed[rule.order(ordered.shape[0])] = ordered
    return placed


def decreasing_rearrangement(f: Field1D) -> Field1D:
    """
    Sort the samples non-increasing on a grid starting at 0.

    Args:
        f: Non-negative field

    Returns:
        Field on cells [0, h], [h, 2h], ... carrying the sorted values
    """
    _require_nonnegative(f)
    grid = Grid1D(x0=f.grid.h / 2.0, h=f.grid.h, n=f.grid.n)
    return Field1D(grid, np.sort(f.values)[::-1])


def symmetric_rearrangement_1d(f: Field1D, rule: PlacementRule = DEFAULT_RULE) -> Field1D:
    """Symmetric decreasing rearrangement of one line onto a grid centered at 0."""
    _require_nonnegative(f)
    return Field1D(Grid1D.centered(f.grid.n, f.grid.h), _place_line(f.values, rule))


def steiner_rearrangement(
    u: Union[Field1D, Field2D], rule: PlacementRule = DEFAULT_RULE
) -> Union[Field1D, Field2D]:
    """
    Symmetric decreasing rearrangement of every line along the Steiner axis.

    Args:
        u: Non-negative field; axis 0 is rearranged
        rule: Placement convention

    Returns:
        Field centered in x1, untouched in x'
    """
    if isinstance(u, Field1D):
        return symmetric_rearrangement_1d(u, rule)
    _require_nonnegative(u)
    grid = Grid2D(Grid1D.centered(u.nx, u.hx), u.grid.y)
    return Field2D(grid, _place_line(u.values, rule))


def schwarz_rearrangement(
    u: Union[Field1D, Field2D], rule: PlacementRule = DEFAULT_RULE
) -> Union[Field1D, Field2D]:
    """Radially symmetric decreasing rearrangement of the whole field."""
    if isinstance(u, Field1D):
        return symmetric_rearrangement_1d(u, rule)
    _require_nonnegative(u)
    if not spacing_matches(u.hx, u.hy):
        raise UnsupportedGridError(f"radial rearrangement needs hx == hy, got {u.hx}, {u.hy}")

    ordered = np.sort(u.values.ravel())[::-1]
    placed = np.empty_like(ordered)
    placed[rule.radial_order(u.nx, u.ny)] = ordered
    grid = Grid2D.centered(u.nx, u.ny, u.hx, u.hy)
    return Field2D(grid, placed.reshape(u.shape))


def coupled_rearrangement(u: Field, v: Field, rule: PlacementRule = DEFAULT_RULE) -> Field:
    """
    Coupled rearrangement: per line, the symmetric decreasing profile whose
    level-set measures are the sums of those of u and v.

    The value multiset of each output line is the union of the two input lines,
    so the output has n_u + n_v cells along the Steiner axis.

    Args:
        u: Non-negative field
        v: Non-negative field of the same dimension and Steiner spacing
        rule: Placement convention

    Returns:
        Field centered in x1 with n_u + n_v cells along it
    """
    _require_nonnegative(u, "first field")
    _require_nonnegative(v, "second field")

    if isinstance(u, Field1D) and isinstance(v, Field1D):
        if not spacing_matches(u.grid.h, v.grid.h):
            raise GridMismatchError(f"spacings differ: {u.grid.h} vs {v.grid.h}")
        merged = np.concatenate((u.values, v.values))
        return Field1D(Grid1D.centered(merged.size, u.grid.h), _place_line(merged, rule))

    if isinstance(u, Field2D) and isinstance(v, Field2D):
        if not spacing_matches(u.hx, v.hx):
            raise GridMismatchError(f"Steiner spacings differ: {u.hx} vs {v.hx}")
        if u.ny != v.ny or not spacing_matches(u.hy, v.hy):
            raise GridMismatchError("transverse grids differ")
        merged = np.concatenate((u.values, v.values), axis=0)
        grid = Grid2D(Grid1D.centered(merged.shape[0], u.hx), u.grid.y)
        return Field2D(grid, _place_line(merged, rule))

    raise GridMismatchError("cannot couple a 1D field with a 2D field")


@dataclass(frozen=True)
class MultiplicityQuery:
    """A level at which crossings of the interpolant are counted."""

    level: float
    zero_extended: bool = False

    def __post_init__(self):
        if not (np.isfinite(self.level) and self.level > 0):
            raise DomainError(f"multiplicity level must be positive, got {self.level}")


def multiplicity(f: Field1D, q: MultiplicityQuery) -> int:
    """
    Number of points where the piecewise-linear interpolant of f equals q.level.

    With q.zero_extended the profile is padded by a zero sample at both ends, so
    boundary crossings count too.
    """
    if np.any(f.values == q.level):
        raise AmbiguousLevelError(f"level {q.level!r} equals a sampled value")
    values = np.concatenate(([0.0], f.values, [0.0])) if q.zero_extended else f.values
    above = values > q.level
    return int(np.count_nonzero(above[1:] != above[:-1]))


def truncate_shift(f: Field, s: float) -> Field:
    """Pointwise (f - s)_+."""
    if not (np.isfinite(s) and s >= 0):
        raise DomainError(f"truncation height must be non-negative, got {s}")
    return f.with_values(np.maximum(f.values - s, 0.0))


@dataclass(frozen=True, eq=False)
class PiecewiseLinear:
    """Continuous piecewise-linear function through (knots, values)."""

    knots: np.ndarray
    values: np.ndarray

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return np.interp(x, self.knots, self.values)

    @property
    def length(self) -> float:
        return float(self.knots[-1] - self.knots[0])

    def gradient_integral(self, p: float) -> float:
        """Exact integral of |derivative|^p."""
        dx = np.diff(self.knots)
        dy = np.diff(self.values)
        keep = dx > 0
        return fsum(dx[keep] * np.abs(dy[keep] / dx[keep]) ** p)


@dataclass(frozen=True, eq=False)
class LevelBands:
    """
    Decomposition of the interpolant's range into bands between consecutive
    sampled levels.

    Inside a band the set of segments crossing it is fixed; crossings[k, i] marks
    segment i crossing band k and slopes[i] is |f'| on segment i.
    """

    lower: np.ndarray
    upper: np.ndarray
    crossings: np.ndarray
    slopes: np.ndarray
    plateau_levels: np.ndarray
    plateau_lengths: np.ndarray

    @property
    def counts(self) -> np.ndarray:
        return self.crossings.sum(axis=1)

    @property
    def widths(self) -> np.ndarray:
        return self.upper - self.lower

    def _per_band(self, per_segment: np.ndarray) -> np.ndarray:
        return np.where(self.crossings, per_segment[None, :], 0.0).sum(axis=1)

    def band_lengths(self) -> np.ndarray:
        """Measure of {lower < f < upper} for every band."""
        with np.errstate(divide="ignore"):
            inverse = np.where(self.slopes > 0, 1.0 / self.slopes, 0.0)
        return self.widths * self._per_band(inverse)

    def rearranged_gradient_integral(self, p: float) -> float:
        """Integral of |(f#)'|^p, band by band."""
        lengths = self.band_lengths()
        active = self.counts > 0
        widths = self.widths[active]
        return fsum(widths**p * lengths[active] ** (1.0 - p))

    def weighted_gradient_integral(self, p: float) -> float:
        """Integral of |f' / N_f(f)|^p, band by band."""
        counts = self.counts
        active = counts > 0
        powered = self._per_band(np.where(self.slopes > 0, self.slopes ** (p - 1.0), 0.0))
        return fsum(self.widths[active] * powered[active] / counts[active].astype(float) ** p)


def level_bands(f: Field1D) -> LevelBands:
    """Band decomposition of the interpolant of f on [x_0, x_{n-1}]."""
    levels = np.unique(f.values)
    left = f.values[:-1]
    right = f.values[1:]
    low = np.minimum(left, right)
    high = np.maximum(left, right)
    slopes = (high - low) / f.grid.h

    sloped = high > low
    crossings = (
        (low[None, :] <= levels[:-1, None]) & (high[None, :] >= levels[1:, None]) & sloped[None, :]
    )

    flat = ~sloped
    plateau_levels, inverse = np.unique(low[flat], return_inverse=True)
    plateau_lengths = np.bincount(inverse, minlength=plateau_levels.size) * f.grid.h

    return LevelBands(
        lower=levels[:-1],
        upper=levels[1:],
        crossings=crossings,
        slopes=slopes,
        plateau_levels=plateau_levels,
        plateau_lengths=plateau_lengths.astype(float),
    )


def interpolant_rearrangement(f: Field1D) -> PiecewiseLinear:
    """
    Exact decreasing rearrangement of the piecewise-linear interpolant of f.

    The result lives on [0, (n-1)h], starts at max f and has breakpoints at the
    sampled levels; flat pieces of f become flat pieces of the result.
    """
    _require_nonnegative(f)
    if f.grid.n < 2:
        return PiecewiseLinear(np.array([0.0, 0.0]), np.array([f.values[0], f.values[0]]))

    bands = level_bands(f)
    plateau = dict(zip(bands.plateau_levels.tolist(), bands.plateau_lengths.tolist()))
    lengths = bands.band_lengths()

    top = float(bands.upper[-1]) if bands.upper.size else float(f.values[0])
    knots = [0.0]
    values = [top]
    position = 0.0

    def add_plateau(level: float) -> None:
        nonlocal position
        width = plateau.get(level, 0.0)
        if width > 0:
            position += width
            knots.append(position)
            values.append(level)

    add_plateau(top)
    for k in range(bands.lower.size - 1, -1, -1):
        position += float(lengths[k])
        knots.append(position)
        values.append(float(bands.lower[k]))
        add_plateau(float(bands.lower[k]))

    logger.debug(f"Interpolant rearrangement built with {len(knots)} knots")
    return PiecewiseLinear(np.asarray(knots), np.asarray(values))
