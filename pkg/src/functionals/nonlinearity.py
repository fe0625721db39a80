"""
Nonlinearity families for the scalar and two-component energies.
Power and tabulated F(u); polynomial G(s1, s2) with its partial derivatives g1, g2.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Optional

import numpy as np

from ..core.exceptions import DomainError, InvalidSpecError, RangeError

SUPPORTED_DIMS = (1, 2)


class NonlinearityKind(Enum):
    """Scalar nonlinearity families."""

    POWER = "power"
    TABULATED = "tabulated"


def _check_dim(dim: int) -> None:
    if dim not in SUPPORTED_DIMS:
        raise DomainError(f"dimension must be one of {SUPPORTED_DIMS}, got {dim}")


@dataclass(frozen=True, eq=False)
class NonlinearitySpec:
    """
    Scalar nonlinearity F with derivative f = F'.

    Power: F(u) = |u|^(p+1)/(p+1), restricted to 1 < p < 1 + 4/dim.
    Tabulated: F is linearly interpolated in |u| between samples (s_k, F_k)
    with s_0 = 0 and F_0 = 0.
    """

    kind: NonlinearityKind
    p: Optional[float] = None
    dim: int = 1
    table_s: Optional[np.ndarray] = field(default=None, repr=False)
    table_F: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        _check_dim(self.dim)
        if self.kind is NonlinearityKind.POWER:
            if self.p is None or not np.isfinite(self.p):
                raise InvalidSpecError("power nonlinearity needs a finite exponent p")
            if not 1.0 < self.p < self.critical_exponent:
                raise DomainError(
                    f"p={self.p} outside the subcritical range (1, {self.critical_exponent:g})"
                )
            return

        s = np.asarray(self.table_s, dtype=float)
        values = np.asarray(self.table_F, dtype=float)
        if s.ndim != 1 or s.shape != values.shape or s.size < 2:
            raise InvalidSpecError("tabulated nonlinearity needs matching 1D sample arrays")
        if s[0] != 0.0 or values[0] != 0.0:
            raise InvalidSpecError("tabulated nonlinearity must start at (0, 0)")
        if np.any(np.diff(s) <= 0) or not np.all(np.isfinite(values)):
            raise InvalidSpecError("tabulated samples must be finite with increasing s")
        s.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "table_s", s)
        object.__setattr__(self, "table_F", values)

    @classmethod
    def power(cls, p: float, dim: int = 1) -> "NonlinearitySpec":
        return cls(kind=NonlinearityKind.POWER, p=float(p), dim=dim)

    @classmethod
    def tabulated(cls, s: Any, F: Any, dim: int = 1) -> "NonlinearitySpec":
        return cls(kind=NonlinearityKind.TABULATED, dim=dim, table_s=s, table_F=F)

    @classmethod
    def zero(cls, s_max: float = 1e3, dim: int = 1) -> "NonlinearitySpec":
        """F identically zero: a purely kinetic energy."""
        return cls.tabulated([0.0, s_max], [0.0, 0.0], dim=dim)

    @property
    def critical_exponent(self) -> float:
        return 1.0 + 4.0 / self.dim

    def _check_range(self, modulus: np.ndarray) -> None:
        if modulus.size and modulus.max() > self.table_s[-1]:
            raise RangeError(
                f"tabulated F covers [0, {self.table_s[-1]:g}], field reaches {modulus.max():g}"
            )

    def _segment_slopes(self, modulus: np.ndarray) -> np.ndarray:
        slopes = np.diff(self.table_F) / np.diff(self.table_s)
        index = np.searchsorted(self.table_s, modulus, side="right") - 1
        index = np.clip(index, 0, slopes.size - 1)
        return slopes[index]

    def potential(self, values: np.ndarray) -> np.ndarray:
        """F(u) pointwise."""
        modulus = np.abs(values)
        if self.kind is NonlinearityKind.POWER:
            return modulus ** (self.p + 1.0) / (self.p + 1.0)
        self._check_range(modulus)
        return np.interp(modulus, self.table_s, self.table_F)

    def derivative(self, values: np.ndarray) -> np.ndarray:
        """f(u) = F'(u) pointwise."""
        values = np.asarray(values, dtype=float)
        if self.kind is NonlinearityKind.POWER:
            return np.abs(values) ** (self.p - 1.0) * values
        modulus = np.abs(values)
        self._check_range(modulus)
        return np.sign(values) * self._segment_slopes(modulus)

    def weight(self, values: np.ndarray) -> np.ndarray:
        """f(u)/u, the potential seen by u when the nonlinearity is frozen."""
        modulus = np.abs(np.asarray(values, dtype=float))
        if self.kind is NonlinearityKind.POWER:
            return modulus ** (self.p - 1.0)
        self._check_range(modulus)
        slopes = self._segment_slopes(modulus)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(modulus > 0, slopes / modulus, 0.0)

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {"kind": self.kind.value, "dim": self.dim}
        if self.kind is NonlinearityKind.POWER:
            data["p"] = self.p
        else:
            data["s"] = self.table_s.tolist()
            data["F"] = self.table_F.tolist()
        return data


@dataclass(frozen=True)
class CoupledGSpec:
    """
    Two-component nonlinearity G(s1, s2) = a1 s1^r1 + a2 s2^r2 + beta s1^gamma1 s2^gamma2,
    evaluated at s1 = u^2, s2 = v^2.

    Construction enforces non-negative coefficients, g1 and g2 nondecreasing in
    both arguments (coupling exponents at least 1), and growth below the
    subcritical ceiling 1 + 2/dim for every active term.
    """

    a1: float = 0.25
    a2: float = 0.25
    r1: float = 2.0
    r2: float = 2.0
    beta: float = 0.5
    gamma1: float = 1.0
    gamma2: float = 1.0
    dim: int = 1

    def __post_init__(self):
        _check_dim(self.dim)
        params = (self.a1, self.a2, self.r1, self.r2, self.beta, self.gamma1, self.gamma2)
        if not all(np.isfinite(params)):
            raise InvalidSpecError("coupled spec parameters must be finite")
        if min(self.a1, self.a2, self.beta) < 0:
            raise InvalidSpecError("coefficients a1, a2, beta must be non-negative")
        if self.gamma1 <= 0 or self.gamma2 <= 0:
            raise InvalidSpecError("coupling exponents must be positive")
        if (self.a1 > 0 and self.r1 <= 1) or (self.a2 > 0 and self.r2 <= 1):
            raise InvalidSpecError("self-interaction exponents must exceed 1")
        if self.beta > 0 and min(self.gamma1, self.gamma2) < 1:
            raise InvalidSpecError(
                f"coupling exponents gamma1={self.gamma1:g}, gamma2={self.gamma2:g} below 1 "
                "make g1, g2 decreasing near zero"
            )
        if not self.is_subcritical():
            raise DomainError(f"growth exceeds the subcritical ceiling {self.ceiling:g}")

    @classmethod
    def manakov(cls, beta: float = 0.5, dim: int = 1) -> "CoupledGSpec":
        """Cubic self-interaction u^4/4 per component plus beta u^2 v^2 coupling."""
        return cls(a1=0.25, a2=0.25, r1=2.0, r2=2.0, beta=beta, gamma1=1.0, gamma2=1.0, dim=dim)

    @classmethod
    def decoupled(cls, dim: int = 1) -> "CoupledGSpec":
        return cls.manakov(beta=0.0, dim=dim)

    @property
    def ceiling(self) -> float:
        return 1.0 + 2.0 / self.dim

    def is_subcritical(self) -> bool:
        if self.a1 > 0 and self.r1 >= self.ceiling:
            return False
        if self.a2 > 0 and self.r2 >= self.ceiling:
            return False
        if self.beta > 0 and self.gamma1 + self.gamma2 >= self.ceiling:
            return False
        return True

    def G(self, s1: np.ndarray, s2: np.ndarray) -> np.ndarray:
        s1 = np.asarray(s1, dtype=float)
        s2 = np.asarray(s2, dtype=float)
        total = np.zeros(np.broadcast(s1, s2).shape)
        if self.a1 > 0:
            total = total + self.a1 * s1**self.r1
        if self.a2 > 0:
            total = total + self.a2 * s2**self.r2
        if self.beta > 0:
            total = total + self.beta * s1**self.gamma1 * s2**self.gamma2
        return total

    def g1(self, s1: np.ndarray, s2: np.ndarray) -> np.ndarray:
        s1 = np.asarray(s1, dtype=float)
        s2 = np.asarray(s2, dtype=float)
        total = np.zeros(np.broadcast(s1, s2).shape)
        if self.a1 > 0:
            total = total + self.a1 * self.r1 * s1 ** (self.r1 - 1.0)
        if self.beta > 0:
            total = total + self.beta * self.gamma1 * s1 ** (self.gamma1 - 1.0) * s2**self.gamma2
        return total

    def g2(self, s1: np.ndarray, s2: np.ndarray) -> np.ndarray:
        s1 = np.asarray(s1, dtype=float)
        s2 = np.asarray(s2, dtype=float)
        total = np.zeros(np.broadcast(s1, s2).shape)
        if self.a2 > 0:
            total = total + self.a2 * self.r2 * s2 ** (self.r2 - 1.0)
        if self.beta > 0:
            total = total + self.beta * self.gamma2 * s1**self.gamma1 * s2 ** (self.gamma2 - 1.0)
        return total

    def monotone_on_lattice(self, sigma_max: float = 4.0, n: int = 50) -> bool:
        """g1, g2 >= 0 and nondecreasing in both arguments on an n-by-n lattice."""
        axis = np.linspace(0.0, sigma_max, n)
        s1, s2 = np.meshgrid(axis, axis, indexing="ij")
        for g in (self.g1(s1, s2), self.g2(s1, s2)):
            if not np.all(np.isfinite(g)) or np.any(g < 0):
                return False
            slack = 1e-12 * max(1.0, float(np.abs(g).max()))
            if np.any(np.diff(g, axis=0) < -slack) or np.any(np.diff(g, axis=1) < -slack):
                return False
        return True

    def strictly_superadditive_on_lattice(self, sigma_max: float = 4.0, n: int = 50) -> bool:
        """G(s1,0) + G(0,s2) < G(s1,s2) on a lattice of positive points."""
        axis = np.linspace(sigma_max / n, sigma_max, n)
        s1, s2 = np.meshgrid(axis, axis, indexing="ij")
        zero = np.zeros_like(s1)
        return bool(np.all(self.G(s1, zero) + self.G(zero, s2) < self.G(s1, s2)))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": "coupled",
            "a1": self.a1,
            "a2": self.a2,
            "r1": self.r1,
            "r2": self.r2,
            "beta": self.beta,
            "gamma1": self.gamma1,
            "gamma2": self.gamma2,
            "dim": self.dim,
        }
