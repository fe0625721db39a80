"""
Test profiles: callables that sample onto grids of any spacing.
Analytic shapes for canonical checks and seeded bump sums for randomized ones.
"""

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from ..core.exceptions import DomainError
from ..core.grid import Field, Field1D, Field2D, Grid1D, Grid2D


def _cells(half_width: float, h: float) -> int:
    """Even cell count covering [-half_width, half_width]."""
    return 2 * max(1, int(math.ceil(half_width / h - 1e-9)))


@dataclass(frozen=True)
class Profile:
    """
    A non-negative function with known extent.

    Whole-line profiles are sampled on centered grids covering
    [-half_width, half_width] (and [-half_height, half_height] in y for 2D).
    Interval profiles (interval set) are sampled at the nodes a, a+h, ... <= b.
    """

    name: str
    func: Callable[..., np.ndarray]
    half_width: float = 8.0
    dim: int = 1
    half_height: float = 2.0
    interval: Optional[Tuple[float, float]] = None

    def __call__(self, *coords: np.ndarray) -> np.ndarray:
        return self.func(*coords)

    def grid(self, h: float, staggered: bool = False) -> Grid1D:
        if self.interval is not None:
            a, b = self.interval
            return Grid1D(x0=a, h=h, n=int(math.floor((b - a) / h + 1e-9)) + 1)
        grid = Grid1D.centered(_cells(self.half_width, h), h)
        return grid.staggered() if staggered else grid

    def grid_2d(self, h: float, staggered: bool = False) -> Grid2D:
        x = Grid1D.centered(_cells(self.half_width, h), h)
        y = Grid1D.centered(_cells(self.half_height, h), h)
        return Grid2D(x.staggered() if staggered else x, y)

    def sample(self, h: float, staggered: bool = False) -> Field:
        """
        Sample at spacing h.

        Args:
            h: Grid spacing
            staggered: Use the grid of opposite cell-count parity along x1

        Returns:
            Field1D or Field2D of the profile's dimension
        """
        if self.dim == 1:
            return Field1D.from_function(self.grid(h, staggered), self.func)
        return Field2D.from_function(self.grid_2d(h, staggered), self.func)


def gaussian(
    scale: float = 1.0, amplitude: float = 1.0, center: float = 0.0, half_width: float = 8.0
) -> Profile:
    """amplitude * exp(-((x - center)/scale)^2)."""
    return Profile(
        name=f"gaussian(scale={scale:g})",
        func=lambda x: amplitude * np.exp(-(((x - center) / scale) ** 2)),
        half_width=half_width,
    )


def sech_profile(b: float = 1.0, amplitude: float = 1.0, half_width: float = 8.0) -> Profile:
    """amplitude * sech(b x), the cubic ground-state shape."""
    return Profile(
        name=f"sech(b={b:g})",
        func=lambda x: amplitude / np.cosh(b * x),
        half_width=half_width,
    )


def gaussian_2d(
    scale_x: float = 1.0, scale_y: float = 1.0, half_width: float = 8.0, half_height: float = 4.0
) -> Profile:
    return Profile(
        name=f"gaussian2d({scale_x:g},{scale_y:g})",
        func=lambda x, y: np.exp(-((x / scale_x) ** 2) - (y / scale_y) ** 2),
        half_width=half_width,
        dim=2,
        half_height=half_height,
    )


def piecewise_linear(knots: Sequence[float], values: Sequence[float], name: str = "pl") -> Profile:
    """Interval profile through (knots, values)."""
    knots = np.asarray(knots, dtype=float)
    values = np.asarray(values, dtype=float)
    if knots.size < 2 or np.any(np.diff(knots) <= 0) or np.any(values < 0):
        raise DomainError("piecewise-linear profile needs increasing knots and values >= 0")
    return Profile(
        name=name,
        func=lambda x: np.interp(x, knots, values),
        interval=(float(knots[0]), float(knots[-1])),
    )


def tent(base: float = 4.0) -> Profile:
    """Symmetric tent min(x, base - x) on [0, base]."""
    return piecewise_linear([0.0, base / 2.0, base], [0.0, base / 2.0, 0.0], name=f"tent({base:g})")


def decaying_exponential(length: float = 4.0, rate: float = 1.0) -> Profile:
    """Strictly decreasing exp(-rate x) on [0, length]."""
    return Profile(
        name=f"exp(-{rate:g}x)",
        func=lambda x: np.exp(-rate * x),
        interval=(0.0, length),
    )


def two_bump(rng: np.random.Generator) -> Profile:
    """
    Asymmetric two-bump piecewise-linear profile vanishing at both ends.

    The four slopes are drawn from disjoint ranges, so every level between the
    valley and the lower peak is crossed four times at four different speeds.
    """
    peak1 = rng.uniform(1.0, 2.0)
    peak2 = rng.uniform(1.0, 2.0)
    valley = rng.uniform(0.2, 0.5) * min(peak1, peak2)
    rise1 = rng.uniform(0.5, 1.0)
    fall1 = rng.uniform(1.5, 2.5)
    rise2 = rng.uniform(3.0, 4.0)
    fall2 = rng.uniform(0.25, 0.45)

    x1 = peak1 / rise1
    x2 = x1 + (peak1 - valley) / fall1
    x3 = x2 + (peak2 - valley) / rise2
    x4 = x3 + peak2 / fall2
    return piecewise_linear(
        [0.0, x1, x2, x3, x4], [0.0, peak1, valley, peak2, 0.0], name="two-bump"
    )


def _bump_func(
    centers: Sequence[np.ndarray],
    widths: Sequence[np.ndarray],
    heights: np.ndarray,
    windows: Sequence[Tuple[float, float]],
) -> Callable[..., np.ndarray]:
    def func(*coords: np.ndarray) -> np.ndarray:
        total = np.zeros(np.broadcast(*coords).shape)
        inside = np.ones(total.shape, dtype=bool)
        for axis, c in enumerate(coords):
            lo, hi = windows[axis]
            inside &= (c > lo) & (c < hi)
        for k in range(heights.size):
            exponent = sum(
                ((c - centers[axis][k]) / widths[axis][k]) ** 2 for axis, c in enumerate(coords)
            )
            total = total + heights[k] * np.exp(-0.5 * exponent)
        return np.where(inside, total, 0.0)

    return func


def _draw_axis(
    rng: np.random.Generator, count: int, window: Tuple[float, float]
) -> Tuple[np.ndarray, np.ndarray]:
    lo, hi = window
    span = hi - lo
    centers = rng.uniform(lo + 0.3 * span, hi - 0.3 * span, count)
    widths = rng.uniform(0.02, 0.06, count) * span
    return centers, widths


def bump_sum(
    rng: np.random.Generator,
    half_width: float = 8.0,
    window: Optional[Tuple[float, float]] = None,
) -> Profile:
    """
    Sum of 1-5 Gaussian bumps with random centers, widths and heights,
    cut to zero outside `window` (default: the central 90% of the domain).
    """
    window = window or (-0.9 * half_width, 0.9 * half_width)
    count = int(rng.integers(1, 6))
    centers, widths = _draw_axis(rng, count, window)
    heights = rng.uniform(0.2, 2.0, count)
    return Profile(
        name=f"bumps({count})",
        func=_bump_func([centers], [widths], heights, [window]),
        half_width=half_width,
    )


def bump_sum_2d(
    rng: np.random.Generator, half_width: float = 8.0, half_height: float = 2.0
) -> Profile:
    """Two-dimensional bump sum, cut to the central 90% of both axes."""
    windows = [(-0.9 * half_width, 0.9 * half_width), (-0.9 * half_height, 0.9 * half_height)]
    count = int(rng.integers(1, 6))
    x_centers, x_widths = _draw_axis(rng, count, windows[0])
    y_centers, y_widths = _draw_axis(rng, count, windows[1])
    y_widths = np.maximum(y_widths, 0.1 * half_height)
    heights = rng.uniform(0.2, 2.0, count)
    return Profile(
        name=f"bumps2d({count})",
        func=_bump_func([x_centers, y_centers], [x_widths, y_widths], heights, windows),
        half_width=half_width,
        dim=2,
        half_height=half_height,
    )


def disjoint_bump_pair(
    rng: np.random.Generator, half_width: float = 8.0
) -> Tuple[Profile, Profile]:
    """Bump sums supported left and right of the origin, with a zero gap between them."""
    left = bump_sum(rng, half_width, window=(-0.9 * half_width, -0.1 * half_width))
    right = bump_sum(rng, half_width, window=(0.1 * half_width, 0.9 * half_width))
    return left, right
