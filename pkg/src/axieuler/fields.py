"""Sampled axisymmetric, swirl-free fields on the (r, z) half-plane.

Grids are cell-centred so that no node ever sits on the axis r = 0.
Values are stored as ``(nr, nz)`` arrays; flattening in C order gives the
row-major, z-fastest node order used by the CSV files.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_DIM = 4


def check_dim(d: int) -> int:
    if int(d) != d or d < 3:
        raise ValueError(f"dimension must be an integer >= 3, got {d!r}")
    return int(d)


@dataclass(frozen=True)
class CylGrid:
    r_max: float
    z_min: float
    z_max: float
    nr: int
    nz: int

    def __post_init__(self):
        if not self.r_max > 0:
            raise ValueError(f"r_max must be positive, got {self.r_max}")
        if not self.z_min < self.z_max:
            raise ValueError(f"need z_min < z_max, got [{self.z_min}, {self.z_max}]")
        if self.nr < 2 or self.nz < 2:
            raise ValueError(f"need nr, nz >= 2, got ({self.nr}, {self.nz})")

    @property
    def hr(self) -> float:
        return self.r_max / self.nr

    @property
    def hz(self) -> float:
        return (self.z_max - self.z_min) / self.nz

    @property
    def r(self) -> np.ndarray:
        return (np.arange(self.nr) + 0.5) * self.hr

    @property
    def z(self) -> np.ndarray:
        return self.z_min + (np.arange(self.nz) + 0.5) * self.hz

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nr, self.nz)

    @property
    def size(self) -> int:
        return self.nr * self.nz

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """Node coordinates as two ``(nr, nz)`` arrays."""
        return np.meshgrid(self.r, self.z, indexing="ij")

    def cell_weights(self, d: int = DEFAULT_DIM) -> np.ndarray:
        """Measure of each cell under r^(d-2) dr dz (midpoint rule)."""
        R, _ = self.mesh()
        return measure_weight(R, d) * (self.hr * self.hz)

    def scaled(self, factor: float) -> "CylGrid":
        return CylGrid(self.r_max * factor, self.z_min * factor, self.z_max * factor, self.nr, self.nz)

    @property
    def z_symmetric(self) -> bool:
        return self.z_min == -self.z_max


def make_uniform_grid(r_max: float, z_min: float, z_max: float, nr: int, nz: int) -> CylGrid:
    return CylGrid(float(r_max), float(z_min), float(z_max), int(nr), int(nz))


def _as_field_array(grid: CylGrid, values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.size != grid.size:
        raise ValueError(f"{name} has {arr.size} samples, grid has {grid.size} nodes")
    arr = arr.reshape(grid.shape)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite samples")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class ScalarField:
    grid: CylGrid
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _as_field_array(self.grid, self.values, "values"))

    def __mul__(self, c: float) -> "ScalarField":
        return ScalarField(self.grid, self.values * c)

    __rmul__ = __mul__

    def __add__(self, other: "ScalarField") -> "ScalarField":
        if other.grid != self.grid:
            raise ValueError("fields live on different grids")
        return ScalarField(self.grid, self.values + other.values)


@dataclass(frozen=True, eq=False)
class VectorFieldRZ:
    grid: CylGrid
    ur: np.ndarray
    uz: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "ur", _as_field_array(self.grid, self.ur, "ur"))
        object.__setattr__(self, "uz", _as_field_array(self.grid, self.uz, "uz"))


def measure_weight(r, d: int = DEFAULT_DIM):
    """Density of the measure r^(d-2) dr dz.

    Up to the sphere-area factor (4*pi for d = 4) this is Lebesgue measure
    on R^d restricted to axisymmetric sets.
    """
    d = check_dim(d)
    if np.any(np.asarray(r) < 0):
        raise ValueError("r must be non-negative")
    return np.asarray(r, dtype=float) ** (d - 2) if np.ndim(r) else float(r) ** (d - 2)


def gaussian_velocity(r, z):
    """Closed-form divergence-free test velocity (u_r, u_z) for d = 4."""
    e = np.exp(-r * r - z * z)
    return e * r * (1.0 - 2.0 * z * z), -e * z * (3.0 - 2.0 * r * r)


def gaussian_vorticity(r, z):
    return 4.0 * r * z * (4.0 - r * r - z * z) * np.exp(-r * r - z * z)


def gaussian_test_field(grid: CylGrid) -> VectorFieldRZ:
    R, Z = grid.mesh()
    ur, uz = gaussian_velocity(R, Z)
    return VectorFieldRZ(grid, ur, uz)


def gaussian_test_vorticity(grid: CylGrid) -> ScalarField:
    R, Z = grid.mesh()
    return ScalarField(grid, gaussian_vorticity(R, Z))


def _d_dr(f: np.ndarray, grid: CylGrid) -> np.ndarray:
    return np.gradient(f, grid.hr, axis=0, edge_order=2)


def _d_dz(f: np.ndarray, grid: CylGrid) -> np.ndarray:
    return np.gradient(f, grid.hz, axis=1, edge_order=2)


def cyl_divergence(u: VectorFieldRZ, d: int = DEFAULT_DIM) -> ScalarField:
    """d_r u_r + d_z u_z + (d-2) u_r / r with second-order stencils.

    Interior nodes use centred differences, boundary nodes one-sided
    three-point formulas, so quadratic fields are differentiated exactly.
    """
    d = check_dim(d)
    R, _ = u.grid.mesh()
    div = _d_dr(u.ur, u.grid) + _d_dz(u.uz, u.grid) + (d - 2) * u.ur / R
    return ScalarField(u.grid, div)


def curl_rz(u: VectorFieldRZ) -> ScalarField:
    """Scalar vorticity d_r u_z - d_z u_r."""
    return ScalarField(u.grid, _d_dr(u.uz, u.grid) - _d_dz(u.ur, u.grid))
