"""Direct O(targets x sources) Biot-Savart sums.

Targets are distributed over threads; every target is summed by one thread
in a fixed source order, so results do not depend on the thread count.
With ``paired`` set, sources come as consecutive z-mirror pairs and each
pair is added as a unit: a + b == b + a bitwise, which makes the velocity
of a z-mirrored configuration exactly mirrored.

The overall factor is (d - 2) / (2 pi); it reproduces closed-form
stream-function fields to quadrature accuracy for every d tested (3..6).
"""

import math
import warnings

import numba
import numpy as np
from numba import prange

from .kernel import _d4_pair, _tau_pair

# numba falls back to another threading layer when TBB is too old; say nothing.
warnings.filterwarnings("ignore", message="The TBB threading layer")


@numba.njit(cache=True)
def _pair(d, fast, r, z, rb, zb, eps2, gx, gw):
    dz = zb - z
    if fast:
        kr, kz = _d4_pair(r, rb, dz, eps2)
    else:
        kr, kz = _tau_pair(d, r, rb, dz, eps2, gx, gw)
    return dz * kr, kz


@numba.njit(cache=True)
def _skipped(i, j, r, z, rb, zb, ex_r, ex_z, skip_self, r_cut, z_cut):
    if skip_self and i == j:
        return True
    dr = abs(rb - r)
    dz = abs(zb - z)
    if ex_r > 0.0 and dr <= ex_r and dz <= ex_z:
        return True
    return dr > r_cut or dz > z_cut


@numba.njit(parallel=True, cache=True)
def biot_savart_sum(tr, tz, sr, sz, strength, d, fast, eps2, gx, gw,
                    ex_r, ex_z, skip_self, paired, r_cut, z_cut):
    n = tr.size
    m = sr.size
    ur = np.zeros(n)
    uz = np.zeros(n)
    pref = 0.5 * (d - 2) / math.pi
    step = 2 if paired else 1
    for i in prange(n):
        r = tr[i]
        z = tz[i]
        acc_r = 0.0
        acc_z = 0.0
        for j0 in range(0, m, step):
            pr = 0.0
            pz = 0.0
            for j in range(j0, j0 + step):
                if _skipped(i, j, r, z, sr[j], sz[j], ex_r, ex_z, skip_self, r_cut, z_cut):
                    continue
                kr, kz = _pair(d, fast, r, z, sr[j], sz[j], eps2, gx, gw)
                pr += strength[j] * kr
                pz += strength[j] * kz
            acc_r += pr
            acc_z += pz
        ur[i] = pref * acc_r
        uz[i] = pref * acc_z
    return ur, uz


@numba.njit(parallel=True, cache=True)
def bound_sum(tr, tz, sr, sz, mass):
    """sum_j mass_j / ((r^2 + rb^2 + dz^2)^(1/2) ((rb - r)^2 + dz^2)^(1/2))."""
    n = tr.size
    out = np.zeros(n)
    for i in prange(n):
        r = tr[i]
        z = tz[i]
        acc = 0.0
        for j in range(sr.size):
            dz = sz[j] - z
            near = (sr[j] - r) * (sr[j] - r) + dz * dz
            if near == 0.0:
                continue
            acc += mass[j] / (math.sqrt(r * r + sr[j] * sr[j] + dz * dz) * math.sqrt(near))
        out[i] = acc
    return out
