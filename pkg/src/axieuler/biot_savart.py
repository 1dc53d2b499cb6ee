"""Velocity reconstruction from scalar vorticity and the stretching diagnostics."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import _sums
from .fields import ScalarField, VectorFieldRZ, check_dim
from .kernel import KernelParams, gauss_legendre
from .lorentz import axis_resolved_samples, lorentz_quasinorm


@dataclass(frozen=True, eq=False)
class ReconstructionJob:
    omega: ScalarField
    targets: np.ndarray
    params: KernelParams
    exclude_diagonal: bool = False

    def __post_init__(self):
        t = np.atleast_2d(np.asarray(self.targets, dtype=float))
        if t.shape[1] != 2:
            raise ValueError("targets must be an (n, 2) array of (r, z)")
        if not np.all(np.isfinite(t)):
            raise ValueError("targets must be finite")
        g = self.omega.grid
        inside = (t[:, 0] >= 0) & (t[:, 0] <= g.r_max) & (t[:, 1] >= g.z_min) & (t[:, 1] <= g.z_max)
        if not np.all(inside):
            raise ValueError(f"target {t[~inside][0]} lies outside the source grid")
        if self.params.epsilon == 0 and not self.exclude_diagonal:
            raise ValueError("epsilon = 0 requires exclude_diagonal=True")
        object.__setattr__(self, "targets", t)


def source_sum(targets: np.ndarray, sr: np.ndarray, sz: np.ndarray, strength: np.ndarray,
               params: KernelParams, fast: bool = True, exclude=(0.0, 0.0),
               skip_self: bool = False, paired: bool = False) -> tuple[np.ndarray, np.ndarray]:
    """Velocity at ``targets`` induced by point sources of given strength.

    A source (rb, zb) of strength S = omega * rb^(d-2) * (cell area)
    contributes (d-2)/(2 pi) * S * ((zb - z) I_r, I_z) with I_r, I_z the inner
    tau-integrals.  ``fast`` uses the closed form (d = 4 only).
    """
    targets = np.ascontiguousarray(targets, dtype=float)
    gx, gw = gauss_legendre(params.tau_order)
    return _sums.biot_savart_sum(
        np.ascontiguousarray(targets[:, 0]), np.ascontiguousarray(targets[:, 1]),
        np.ascontiguousarray(sr, dtype=float), np.ascontiguousarray(sz, dtype=float),
        np.ascontiguousarray(strength, dtype=float), params.d, bool(fast and params.d == 4),
        params.epsilon ** 2, gx, gw, float(exclude[0]), float(exclude[1]),
        bool(skip_self), bool(paired), float(params.r_cut), float(params.z_cut))


def velocity_from_vorticity(job: ReconstructionJob, fast: bool = True) -> np.ndarray:
    """Midpoint-rule reconstruction of (u_r, u_z) at the job's targets.

    Returns an ``(n, 2)`` array.  The source cell containing a target is
    either mollified (epsilon > 0, squared distance + epsilon^2) or dropped
    (``exclude_diagonal``).
    """
    g = job.omega.grid
    d = job.params.d
    R, Z = g.mesh()
    strength = job.omega.values * R ** (d - 2) * (g.hr * g.hz)
    exclude = (0.5 * g.hr, 0.5 * g.hz) if job.exclude_diagonal else (0.0, 0.0)
    ur, uz = source_sum(job.targets, R.ravel(), Z.ravel(), strength.ravel(), job.params,
                        fast=fast, exclude=exclude)
    return np.column_stack([ur, uz])


def reconstruct_on_grid(omega: ScalarField, params: KernelParams, fast: bool = True) -> VectorFieldRZ:
    R, Z = omega.grid.mesh()
    job = ReconstructionJob(omega, np.column_stack([R.ravel(), Z.ravel()]), params,
                            exclude_diagonal=params.epsilon == 0)
    u = velocity_from_vorticity(job, fast=fast)
    return VectorFieldRZ(omega.grid, u[:, 0], u[:, 1])


def velocity_bound_rhs(omega: ScalarField, target, d: int = 4) -> float:
    """(8 r / pi) * int int |omega| / (rho_+ rho_-) drb dzb by the midpoint rule.

    rho_+ = (r^2 + rb^2 + dz^2)^(1/2), rho_- = ((rb - r)^2 + dz^2)^(1/2).
    The integrand carries no rb^2 weight.
    """
    if check_dim(d) != 4:
        raise ValueError("the pointwise velocity bound is stated for d = 4")
    r, z = (float(v) for v in target)
    if not r > 0:
        raise ValueError("the bound is vacuous on the axis; need r > 0")
    g = omega.grid
    R, Z = g.mesh()
    mass = np.abs(omega.values).ravel() * (g.hr * g.hz)
    total = _sums.bound_sum(np.array([r]), np.array([z]), R.ravel(), Z.ravel(), mass)[0]
    return 8.0 * r / math.pi * total


class StretchingRatio(NamedTuple):
    sup_ur_over_r: float
    l21: float
    ratio: float
    zero: bool = False


def axis_limit(values: np.ndarray) -> np.ndarray:
    """Quadratic extrapolation to r = 0 from the first three cell centres
    (r = h/2, 3h/2, 5h/2) along axis 0."""
    return (15.0 * values[0] - 10.0 * values[1] + 3.0 * values[2]) / 8.0


def stretching_ratio(u: VectorFieldRZ, omega: ScalarField, d: int = 4) -> StretchingRatio:
    """sup |u_r / r| against ||omega / r^2||_{L^{2,1}(r^2 dr dz)}."""
    if check_dim(d) != 4:
        raise ValueError("the stretching bound is stated for d = 4")
    if u.grid != omega.grid:
        raise ValueError("u and omega must share a grid")
    R, _ = u.grid.mesh()
    q = u.ur / R
    sup = float(max(np.abs(q).max(), np.abs(axis_limit(q)).max()))
    l21 = lorentz_quasinorm(axis_resolved_samples(omega), (2, 1))
    if l21 == 0:
        if sup != 0:
            raise ValueError("nonzero u_r with zero ||omega/r^2||_{2,1}: inconsistent inputs")
        return StretchingRatio(0.0, 0.0, 0.0, True)
    return StretchingRatio(sup, l21, sup / l21)


def product_constant(c_holder: float) -> float:
    """(8 / pi) * C_H * sqrt(8 pi), the constant assembled from the pointwise
    bound, the Lorentz pairing and the weak norm of g."""
    return 8.0 / math.pi * c_holder * math.sqrt(8.0 * math.pi)
