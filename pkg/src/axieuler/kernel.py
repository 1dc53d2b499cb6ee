"""Integral kernels of the axisymmetric Biot-Savart law.

The inner angular integral of the velocity reconstruction is

    I(tau-factor) = int_{-1}^{1} F(tau) (1 - tau^2)^((d-4)/2)
                    / (r^2 + rb^2 - 2 r rb tau + dz^2)^(d/2) dtau

with F(tau) = tau for u_r and F(tau) = r tau - rb for u_z.  For d = 4 it
factors through

    H(s) = int_{-1}^{1} tau / (1 - s tau)^2 dtau,   0 <= s < 1,

which has the elementary closed form
(2 s / (1 - s^2) - log((1 + s) / (1 - s))) / s^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numba
import numpy as np

from .fields import DEFAULT_DIM, check_dim

UR = "ur"
UZ = "uz"

# Below this s the closed form loses ~eps/s^2 relative accuracy; use the
# odd power series sum_k 4k/(2k+1) s^(2k-1) instead (12 terms reach 1e-17).
_SERIES_SWITCH = 0.1
_SERIES_TERMS = 12


@dataclass(frozen=True)
class KernelParams:
    d: int = DEFAULT_DIM
    tau_order: int = 16
    epsilon: float = 0.0
    r_cut: float = math.inf
    z_cut: float = math.inf

    def __post_init__(self):
        check_dim(self.d)
        if self.tau_order < 4:
            raise ValueError(f"tau_order must be >= 4, got {self.tau_order}")
        if self.epsilon < 0:
            raise ValueError(f"epsilon must be >= 0, got {self.epsilon}")
        if not (self.r_cut > 0 and self.z_cut > 0):
            raise ValueError("truncation radii must be positive")


@numba.njit(cache=True)
def _h_scalar(s, oms):
    """H(s) given s and an accurately computed 1 - s."""
    if s < _SERIES_SWITCH:
        s2 = s * s
        term = s
        acc = 0.0
        for k in range(1, _SERIES_TERMS + 1):
            acc += 4.0 * k / (2.0 * k + 1.0) * term
            term *= s2
        return acc
    return (2.0 * s / (oms * (1.0 + s)) - (math.log1p(s) - math.log(oms))) / (s * s)


@numba.vectorize(["float64(float64)"], cache=True)
def _h_ufunc(s):
    return _h_scalar(s, 1.0 - s)


def _check_s(s) -> np.ndarray:
    arr = np.asarray(s, dtype=float)
    if np.any(~(arr >= 0)) or np.any(arr >= 1):
        raise ValueError("H(s) is defined for 0 <= s < 1 only")
    return arr


def H_closed(s):
    """Closed-form H(s); accepts scalars or arrays."""
    arr = _check_s(s)
    out = _h_ufunc(arr)
    return float(out) if np.ndim(out) == 0 else out


@lru_cache(maxsize=None)
def gauss_legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(order)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def H_quad(s, order: int = 64):
    """Gauss-Legendre value of H(s), independent of the closed form.

    The substitution u = log(1 - s tau) maps the integrand to
    (e^{-u} - 1) / s^2 on [log(1 - s), log(1 + s)], which is entire, so the
    rule converges geometrically even as s -> 1.  No antiderivative is used.
    """
    arr = _check_s(s)
    x, w = gauss_legendre(int(order))
    flat = np.atleast_1d(arr).astype(float)
    out = np.zeros_like(flat)
    pos = flat > 0
    sp = flat[pos][:, None]
    lo, hi = np.log1p(-sp), np.log1p(sp)
    half = 0.5 * (hi - lo)
    u = 0.5 * (hi + lo) + half * x
    integral = (half * (w * np.expm1(-u))).sum(axis=1, keepdims=True)
    out[pos] = (integral / (sp * sp))[:, 0]
    return float(out[0]) if arr.ndim == 0 else out.reshape(arr.shape)


@numba.njit(cache=True)
def _tau_pair(d, r, rb, dz, eps2, gx, gw):
    """Both inner integrals (u_r factor, u_z factor) by graded Gauss-Legendre.

    Works in theta with tau = cos(theta), where the weight becomes
    sin(theta)^(d-3) and the denominator
    A + 4 r rb sin^2(theta/2), A = (r-rb)^2 + dz^2 + eps^2,
    is evaluated without cancellation.  Panels double in width away from
    theta = 0, starting at the width sqrt(A / (r rb)) of the near-diagonal
    peak, so accuracy is uniform up to the singular configuration.
    """
    a = (r - rb) * (r - rb) + dz * dz + eps2
    four_rrb = 4.0 * r * rb
    half_d = 0.5 * d
    wexp = d - 3
    if r * rb > 0.0:
        width = math.sqrt(a / (r * rb))
    else:
        width = math.pi
    if width >= 0.5 * math.pi:
        width = math.pi
    ir = 0.0
    iz = 0.0
    lo = 0.0
    hi = width
    n = gx.size
    while lo < math.pi:
        if hi > math.pi or math.pi - hi < 0.25 * (hi - lo):
            hi = math.pi
        mid = 0.5 * (hi + lo)
        half = 0.5 * (hi - lo)
        pr = 0.0
        pz = 0.0
        for k in range(n):
            th = mid + half * gx[k]
            t = math.cos(th)
            sh = math.sin(0.5 * th)
            den = a + four_rrb * sh * sh
            base = math.sin(th) ** wexp / den ** half_d
            pr += gw[k] * t * base
            pz += gw[k] * (r * t - rb) * base
        ir += half * pr
        iz += half * pz
        lo = hi
        hi = 2.0 * hi
    return ir, iz


@numba.njit(cache=True)
def _d4_pair(r, rb, dz, eps2):
    """Closed-form inner integrals for d = 4.

    With P = r^2 + rb^2 + dz^2 + eps^2 and s = 2 r rb / P:
    u_r factor H(s) / P^2, u_z factor (r H(s) - rb G(s)) / P^2,
    G(s) = int 1/(1 - s tau)^2 = 2 / (1 - s^2).  1 - s is formed as
    ((r - rb)^2 + dz^2 + eps^2) / P to keep relative accuracy near the diagonal.
    """
    a = (r - rb) * (r - rb) + dz * dz + eps2
    p = r * r + rb * rb + dz * dz + eps2
    s = 2.0 * r * rb / p
    oms = a / p
    h = _h_scalar(s, oms)
    g = 2.0 / (oms * (1.0 + s))
    p2 = p * p
    return h / p2, (r * h - rb * g) / p2


def tau_kernel(d: int, r: float, rbar: float, dz: float, sign: str = UR, order: int = 16,
               epsilon: float = 0.0) -> float:
    """Inner tau-integral of the velocity reconstruction for one source/target pair.

    ``sign`` selects the u_r numerator (tau) or the u_z numerator
    (r tau - rbar).  ``order`` is the node count per quadrature panel.
    """
    d = check_dim(d)
    if sign not in (UR, UZ):
        raise ValueError(f"sign must be {UR!r} or {UZ!r}")
    if r < 0 or rbar < 0:
        raise ValueError("radii must be non-negative")
    if epsilon == 0 and r == rbar and dz == 0:
        raise ValueError("singular configuration r == rbar, dz == 0 needs epsilon > 0")
    if r == 0 and rbar == 0 and dz == 0:
        raise ValueError("r, rbar and dz cannot all vanish")
    gx, gw = gauss_legendre(int(order))
    ir, iz = _tau_pair(d, float(r), float(rbar), float(dz), float(epsilon) ** 2, gx, gw)
    return ir if sign == UR else iz


def g_kernel(a: float, b: float, r, z):
    """g_{a,b}(r, z) = (a^2 + r^2 + (z-b)^2)^(-1/2) ((r-a)^2 + (z-b)^2)^(-1/2)."""
    if not a > 0:
        raise ValueError(f"a must be positive, got {a}")
    r = np.asarray(r, dtype=float)
    z = np.asarray(z, dtype=float)
    dz2 = (z - b) ** 2
    near = (r - a) ** 2 + dz2
    if np.any(near == 0):
        raise ValueError("g_{a,b} is singular at (a, b)")
    out = 1.0 / (np.sqrt(a * a + r * r + dz2) * np.sqrt(near))
    return float(out) if out.ndim == 0 else out
