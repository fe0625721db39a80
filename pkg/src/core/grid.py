"""
Uniform grids, sampled fields, quadrature and finite differences.
Cells are centered; every integral is an exact sum over the samples.
"""

import math
from dataclasses import dataclass
from typing import Any, Callable, ClassVar, Dict, Tuple, Union

import numpy as np

from .exceptions import (
    ContractViolationError,
    DegenerateGridError,
    DomainError,
    GridError,
    GridMismatchError,
)

# Relative tolerance used when two independently produced spacings are compared.
SPACING_RTOL = 1e-9


def fsum(values: np.ndarray) -> float:
    """Correctly rounded sum; depends only on the multiset of values."""
    return math.fsum(np.ravel(values).tolist())


def spacing_matches(h1: float, h2: float) -> bool:
    """Check whether two grid spacings agree within SPACING_RTOL."""
    return abs(h1 - h2) <= SPACING_RTOL * max(abs(h1), abs(h2))


@dataclass(frozen=True)
class Grid1D:
    """
    Uniform cell-centered grid on the line.

    Cell i has center x0 + i*h and carries measure h.
    """

    x0: float
    h: float
    n: int

    def __post_init__(self):
        if not (math.isfinite(self.h) and self.h > 0):
            raise GridError(f"grid spacing must be positive and finite, got {self.h}")
        if int(self.n) != self.n or self.n < 1:
            raise GridError(f"cell count must be a positive integer, got {self.n}")
        if not math.isfinite(self.x0):
            raise GridError(f"grid origin must be finite, got {self.x0}")
        object.__setattr__(self, "x0", float(self.x0))
        object.__setattr__(self, "h", float(self.h))
        object.__setattr__(self, "n", int(self.n))

    @classmethod
    def centered(cls, n: int, h: float) -> "Grid1D":
        """Grid of n cells whose centers are symmetric about 0."""
        return cls(x0=-(n - 1) * h / 2.0, h=h, n=n)

    @classmethod
    def covering(cls, length: float, h: float) -> "Grid1D":
        """Centered grid with at least `length` of support."""
        if length <= 0:
            raise GridError(f"domain length must be positive, got {length}")
        n = max(1, int(math.ceil(length / h - 1e-9)))
        return cls.centered(n, h)

    @property
    def centers(self) -> np.ndarray:
        return self.x0 + self.h * np.arange(self.n)

    @property
    def length(self) -> float:
        return self.n * self.h

    def staggered(self) -> "Grid1D":
        """Centered grid with the opposite cell-count parity; its centers sit h/2 off ours."""
        return Grid1D.centered(self.n + 1, self.h)

    def refined(self) -> "Grid1D":
        """Grid with spacing h/2 covering exactly the same cells."""
        return Grid1D(x0=self.x0 - self.h / 4.0, h=self.h / 2.0, n=2 * self.n)

    def to_dict(self) -> Dict[str, Any]:
        return {"x0": self.x0, "h": self.h, "n": self.n}


@dataclass(frozen=True)
class Grid2D:
    """Tensor grid; axis 0 (x) is the Steiner axis x1, axis 1 (y) is x'."""

    x: Grid1D
    y: Grid1D

    @classmethod
    def centered(cls, nx: int, ny: int, hx: float, hy: float) -> "Grid2D":
        return cls(Grid1D.centered(nx, hx), Grid1D.centered(ny, hy))

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.x.n, self.y.n)

    def refined(self) -> "Grid2D":
        return Grid2D(self.x.refined(), self.y.refined())

    def mesh(self) -> Tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.x.centers, self.y.centers, indexing="ij")

    def to_dict(self) -> Dict[str, Any]:
        return {"x": self.x.to_dict(), "y": self.y.to_dict()}


def _frozen_array(values: Any, shape: Tuple[int, ...]) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.shape != shape:
        raise GridError(f"values have shape {arr.shape}, grid expects {shape}")
    if not np.all(np.isfinite(arr)):
        raise DomainError("field values must be finite")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Field1D:
    """Sampled function on a Grid1D. Values are stored read-only."""

    grid: Grid1D
    values: np.ndarray

    ndim: ClassVar[int] = 1

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen_array(self.values, (self.grid.n,)))

    @classmethod
    def from_samples(cls, grid: Grid1D, values: Any) -> "Field1D":
        """Build a field from raw samples, taking moduli (signed or complex input)."""
        return cls(grid, np.abs(np.asarray(values)))

    @classmethod
    def from_function(cls, grid: Grid1D, func: Callable[[np.ndarray], np.ndarray]) -> "Field1D":
        return cls.from_samples(grid, func(grid.centers))

    @classmethod
    def zeros(cls, grid: Grid1D) -> "Field1D":
        return cls(grid, np.zeros(grid.n))

    @property
    def shape(self) -> Tuple[int]:
        return (self.grid.n,)

    @property
    def measure(self) -> float:
        return self.grid.h

    @property
    def h(self) -> float:
        return self.grid.h

    def spacing(self, axis: int = 0) -> float:
        if axis != 0:
            raise DomainError(f"1D field has no axis {axis}")
        return self.grid.h

    def with_values(self, values: Any) -> "Field1D":
        return Field1D(self.grid, values)

    def is_nonnegative(self) -> bool:
        return bool(np.all(self.values >= 0))


@dataclass(frozen=True, eq=False)
class Field2D:
    """
    Sampled function on a Grid2D, values shaped (nx, ny).

    Line j is the restriction x1 -> u(x1, y_j), i.e. values[:, j].
    """

    grid: Grid2D
    values: np.ndarray

    ndim: ClassVar[int] = 2

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen_array(self.values, self.grid.shape))

    @classmethod
    def from_samples(cls, grid: Grid2D, values: Any) -> "Field2D":
        return cls(grid, np.abs(np.asarray(values)))

    @classmethod
    def from_function(
        cls, grid: Grid2D, func: Callable[[np.ndarray, np.ndarray], np.ndarray]
    ) -> "Field2D":
        xx, yy = grid.mesh()
        return cls.from_samples(grid, func(xx, yy))

    @classmethod
    def zeros(cls, grid: Grid2D) -> "Field2D":
        return cls(grid, np.zeros(grid.shape))

    @property
    def nx(self) -> int:
        return self.grid.x.n

    @property
    def ny(self) -> int:
        return self.grid.y.n

    @property
    def hx(self) -> float:
        return self.grid.x.h

    @property
    def hy(self) -> float:
        return self.grid.y.h

    @property
    def origin(self) -> Tuple[float, float]:
        return (self.grid.x.x0, self.grid.y.x0)

    @property
    def shape(self) -> Tuple[int, int]:
        return self.grid.shape

    @property
    def measure(self) -> float:
        return self.hx * self.hy

    def spacing(self, axis: int = 0) -> float:
        if axis == 0:
            return self.hx
        if axis == 1:
            return self.hy
        raise DomainError(f"2D field has no axis {axis}")

    def line(self, j: int) -> Field1D:
        return Field1D(self.grid.x, self.values[:, j])

    def with_values(self, values: Any) -> "Field2D":
        return Field2D(self.grid, values)

    def is_nonnegative(self) -> bool:
        return bool(np.all(self.values >= 0))


Field = Union[Field1D, Field2D]


@dataclass(frozen=True, eq=False)
class DistributionProfile:
    """Level-set measures t -> |{u > t}| at a list of thresholds."""

    thresholds: np.ndarray
    measures: np.ndarray
    cell_counts: np.ndarray

    def to_dict(self) -> Dict[str, Any]:
        return {
            "thresholds": self.thresholds.tolist(),
            "measures": self.measures.tolist(),
            "cell_counts": self.cell_counts.tolist(),
        }


def require_same_grid(u: Field, v: Field) -> None:
    """Raise GridMismatchError unless u and v live on the same grid."""
    if type(u) is not type(v) or u.grid != v.grid:
        raise GridMismatchError(f"fields live on different grids: {u.grid} vs {v.grid}")


def integrate(u: Field, density: Any) -> float:
    """Integral of a pointwise density sampled on the grid of u."""
    dens = np.asarray(density, dtype=float)
    if dens.shape != u.shape:
        raise GridError(f"density shape {dens.shape} does not match field shape {u.shape}")
    return u.measure * fsum(dens)


def lp_norm(u: Field, p: float) -> float:
    """
    The p-th power integral of |u|.

    Args:
        u: Sampled field
        p: Exponent, at least 1

    Returns:
        measure * sum(|u_i|^p)
    """
    if not p >= 1:
        raise DomainError(f"lp_norm needs p >= 1, got {p}")
    return integrate(u, np.abs(u.values) ** p)


def _padded(values: np.ndarray, axis: int) -> np.ndarray:
    pad = [(0, 0)] * values.ndim
    pad[axis] = (1, 1)
    return np.pad(values, pad)


def gradient_seminorm(u: Field, p: float, axis: int = 0, zero_extended: bool = True) -> float:
    """
    Integral of |du/dx_axis|^p from forward differences.

    Args:
        u: Sampled field
        p: Exponent, at least 1
        axis: numpy axis (0 is the Steiner axis)
        zero_extended: Include the jumps to zero beyond both grid ends

    Returns:
        measure * sum(|diff / h|^p)
    """
    if not p >= 1:
        raise DomainError(f"gradient_seminorm needs p >= 1, got {p}")
    if axis < 0 or axis >= u.ndim:
        raise DomainError(f"axis {axis} out of range for a {u.ndim}D field")
    if u.shape[axis] < 2:
        raise DegenerateGridError(f"axis {axis} has a single cell")

    values = _padded(u.values, axis) if zero_extended else u.values
    slopes = np.diff(values, axis=axis) / u.spacing(axis)
    return u.measure * fsum(np.abs(slopes) ** p)


def distribution_profile(u: Field, levels: Any) -> DistributionProfile:
    """Cell-counting measure of the super-level sets {u > t}."""
    thresholds = np.asarray(levels, dtype=float).ravel()
    if thresholds.size and (np.any(thresholds <= 0) or np.any(np.diff(thresholds) <= 0)):
        raise DomainError("levels must be positive and strictly increasing")

    ordered = np.sort(u.values.ravel())
    counts = ordered.size - np.searchsorted(ordered, thresholds, side="right")
    return DistributionProfile(
        thresholds=thresholds,
        measures=counts * u.measure,
        cell_counts=counts.astype(np.int64),
    )


def quadrature_phi(u: Field, phi: Callable[[np.ndarray], np.ndarray]) -> float:
    """Integral of phi(u); phi must vanish at 0."""
    at_zero = np.asarray(phi(np.zeros(1)), dtype=float)
    if np.any(at_zero != 0):
        raise ContractViolationError(f"phi(0) must be 0, got {at_zero.ravel()[0]}")
    return integrate(u, phi(u.values))


def laplacian(u: Field) -> np.ndarray:
    """Second-difference Laplacian with zero boundary values, same shape as u."""
    result = np.zeros(u.shape)
    for axis in range(u.ndim):
        h = u.spacing(axis)
        result += np.diff(_padded(u.values, axis), n=2, axis=axis) / (h * h)
    return result


def shift_cells(u: Field, k: int, axis: int = 0) -> Field:
    """Translate u by k whole cells along axis; the support must stay on the grid."""
    if k == 0:
        return u
    n = u.shape[axis]
    if abs(k) >= n:
        raise DomainError(f"shift {k} exceeds the {n} cells of axis {axis}")

    leaving = range(n - k, n) if k > 0 else range(0, -k)
    if np.any(np.take(u.values, list(leaving), axis=axis) != 0):
        raise DomainError(f"shift {k} moves support outside the grid")
    return u.with_values(np.roll(u.values, k, axis=axis))


def pad_cells(u: Field1D, n_total: int) -> Field1D:
    """Embed u into a centered grid of n_total cells with zeros on both sides."""
    n = u.grid.n
    if n_total < n:
        raise GridError(f"cannot pad {n} cells into {n_total}")
    left = (n_total - n) // 2
    values = np.zeros(n_total)
    values[left : left + n] = u.values
    return Field1D(Grid1D.centered(n_total, u.grid.h), values)


def interpolate_onto(u: Field1D, grid: Grid1D) -> Field1D:
    """Linear interpolation of u onto another grid, zero outside its support."""
    values = np.interp(grid.centers, u.grid.centers, u.values, left=0.0, right=0.0)
    return Field1D(grid, values)
