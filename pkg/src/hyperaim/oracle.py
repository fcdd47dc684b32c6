"""Finite-difference reference eigensolver for the radial equation.

Three-point discretization of -(hbar^2/2m) u'' + [hbar^2 l(l+1)/(2m r^2) + V(r)] u = E u
on interior points of (r_min, r_max) with Dirichlet ends, eigenvalues by
Sturm-count bisection in double precision, Richardson extrapolation over a grid
and the grid with half the spacing.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numba
import numpy as np

from .errors import ConfigError, GridTooCoarse
from .potential import PotentialParams, _v_np

TOO_COARSE = 1e-4


@dataclass(frozen=True)
class OracleGrid:
    r_min: float = 1e-3
    r_max: float = 30.0
    n_points: int = 20000

    def __post_init__(self):
        if not 0 < self.r_min < self.r_max:
            raise ConfigError(f"r_min/r_max: need 0 < r_min < r_max, got {self.r_min}, {self.r_max}")
        if self.n_points < 100:
            raise ConfigError(f"n_points: must be at least 100, got {self.n_points}")

    @classmethod
    def for_params(cls, p: PotentialParams, n_points: int = 20000) -> "OracleGrid":
        return cls(1e-3 / p.lam, 30.0 / p.lam, n_points)

    @property
    def h(self) -> float:
        return (self.r_max - self.r_min) / (self.n_points + 1)

    def refined(self) -> "OracleGrid":
        """Grid with exactly half the spacing."""
        return OracleGrid(self.r_min, self.r_max, 2 * self.n_points + 1)

    def points(self) -> np.ndarray:
        return self.r_min + self.h * np.arange(1, self.n_points + 1)


@dataclass(frozen=True)
class TridiagonalOperator:
    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self):
        if len(self.offdiag) != len(self.diag) - 1:
            raise ValueError("offdiag must be one shorter than diag")


def discretize(p: PotentialParams, grid: OracleGrid) -> TridiagonalOperator:
    r = grid.points()
    h = grid.h
    kin = p.hbar**2 / (2 * p.mass)
    diag = 2 * kin / h**2 + kin * p.ell * (p.ell + 1) / r**2 + _v_np(r, p)
    off = np.full(len(r) - 1, -kin / h**2)
    return TridiagonalOperator(diag, off)


@numba.njit(cache=True)
def _sturm_count(d, e2, sigma):
    """Number of eigenvalues below sigma (negative pivots of the LDL^T of T - sigma)."""
    count = 0
    q = d[0] - sigma
    if q < 0:
        count += 1
    for i in range(1, d.shape[0]):
        if q == 0.0:
            q = 1e-300
        q = d[i] - sigma - e2[i - 1] / q
        if q < 0:
            count += 1
    return count


@numba.njit(cache=True)
def _bisect_all(d, e2, lo, hi, count, tol):
    out = np.empty(count)
    for j in range(count):
        a, b = lo, hi
        while b - a > tol:
            m = 0.5 * (a + b)
            if _sturm_count(d, e2, m) > j:
                b = m
            else:
                a = m
        out[j] = 0.5 * (a + b)
        lo = a
    return out


def sturm_count(op: TridiagonalOperator, sigma: float) -> int:
    return int(_sturm_count(np.ascontiguousarray(op.diag, dtype=float), np.asarray(op.offdiag, dtype=float) ** 2, float(sigma)))


def _gershgorin(op: TridiagonalOperator) -> tuple[float, float]:
    a = np.abs(np.concatenate([[0.0], op.offdiag]))
    b = np.abs(np.concatenate([op.offdiag, [0.0]]))
    return float(np.min(op.diag - a - b)), float(np.max(op.diag + a + b))


def eigen_bisect(op: TridiagonalOperator, count: int, tol: float = 1e-11) -> list[float]:
    """Lowest ``count`` eigenvalues by Sturm-count bisection."""
    if count < 1:
        raise ValueError("count must be at least 1")
    count = min(count, len(op.diag))
    lo, hi = _gershgorin(op)
    d = np.ascontiguousarray(op.diag, dtype=float)
    e2 = np.asarray(op.offdiag, dtype=float) ** 2
    return list(_bisect_all(d, e2, lo - 1e-9, hi + 1e-9, count, tol))


def negative_eigenvalues(op: TridiagonalOperator, count: int | None = None) -> list[float]:
    n_neg = sturm_count(op, 0.0)
    if count is not None:
        n_neg = min(n_neg, count)
    return eigen_bisect(op, n_neg) if n_neg else []


@dataclass(frozen=True)
class OracleResult:
    energies: list
    coarse: list
    fine: list


def oracle_details(p: PotentialParams, grid: OracleGrid | None = None, count: int | None = None,
                   extrapolate: bool = True) -> OracleResult:
    grid = grid or OracleGrid.for_params(p)
    coarse = negative_eigenvalues(discretize(p, grid), count)
    if not extrapolate:
        return OracleResult(coarse, coarse, [])
    fine = negative_eigenvalues(discretize(p, grid.refined()), count)
    m = min(len(coarse), len(fine))
    rich = [(4 * f - c) / 3 for c, f in zip(coarse[:m], fine[:m])]
    spread = [abs(f - c) for c, f in zip(coarse[:m], fine[:m])]
    if spread and max(spread) > TOO_COARSE:
        warnings.warn(f"two-grid estimates differ by up to {max(spread):.3g}; refine the grid", GridTooCoarse, stacklevel=2)
    # a level can sit just below zero on one grid only; keep the extrapolated ones that stay bound
    return OracleResult([e for e in rich if e < 0], coarse, fine)


def oracle_spectrum(p: PotentialParams, grid: OracleGrid | None = None, count: int | None = None,
                    extrapolate: bool = True) -> list[float]:
    """Negative eigenvalues of the discretized radial operator, lowest first."""
    return oracle_details(p, grid, count, extrapolate).energies
