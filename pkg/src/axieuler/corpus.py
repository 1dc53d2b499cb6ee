"""Random smooth axisymmetric, swirl-free, divergence-free test fields.

Fields come from a Stokes-type stream function psi = r^(d-1) phi(r, z),

    u_r = d_z psi / r^(d-2) = r phi_z,
    u_z = -d_r psi / r^(d-2) = -(d-1) phi - r phi_r,

which satisfies d_r u_r + d_z u_z + (d-2) u_r / r = 0 identically, with

    omega = d_r u_z - d_z u_r = -d phi_r - r (phi_rr + phi_zz).

phi is a sum of separable terms c r^k (z-b)^n exp(-alpha r^2 - beta (z-b)^2)
with even k, so u is smooth on R^d and u_r / r = phi_z stays bounded.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fields import CylGrid, ScalarField, VectorFieldRZ, check_dim


def _gauss_factor(x, power, rate):
    """x^power exp(-rate x^2) and its first two derivatives."""
    e = np.exp(-rate * x * x)
    xp = x ** power
    d1 = -2.0 * rate * x ** (power + 1)
    d2 = -2.0 * rate * (2 * power + 1) * xp + 4.0 * rate ** 2 * x ** (power + 2)
    if power >= 1:
        d1 = d1 + power * x ** (power - 1)
    if power >= 2:
        d2 = d2 + power * (power - 1) * x ** (power - 2)
    return xp * e, d1 * e, d2 * e


@dataclass(frozen=True)
class StreamTerm:
    amp: float
    k: int
    n: int
    alpha: float
    beta: float
    center: float

    def derivs(self, r, z):
        f, fr, frr = _gauss_factor(r, self.k, self.alpha)
        g, gz, gzz = _gauss_factor(z - self.center, self.n, self.beta)
        c = self.amp
        return c * f * g, c * fr * g, c * f * gz, c * frr * g, c * f * gzz


@dataclass(frozen=True)
class StreamField:
    terms: tuple[StreamTerm, ...]
    d: int = 4
    scale: float = 1.0

    def __post_init__(self):
        check_dim(self.d)

    def _phi(self, r, z):
        r = np.asarray(r, dtype=float) * self.scale
        z = np.asarray(z, dtype=float) * self.scale
        acc = [np.zeros(np.broadcast(r, z).shape) for _ in range(5)]
        for term in self.terms:
            for a, v in zip(acc, term.derivs(r, z)):
                a += v
        return r, acc

    def velocity(self, r, z):
        """(u_r, u_z) of u(scale * x)."""
        rs, (phi, phi_r, phi_z, _, _) = self._phi(r, z)
        return rs * phi_z, -(self.d - 1) * phi - rs * phi_r

    def ur_over_r(self, r, z):
        _, (_, _, phi_z, _, _) = self._phi(r, z)
        return self.scale * phi_z

    def vorticity(self, r, z):
        rs, (_, phi_r, _, phi_rr, phi_zz) = self._phi(r, z)
        return self.scale * (-self.d * phi_r - rs * (phi_rr + phi_zz))

    def rescaled(self, lam: float) -> "StreamField":
        """The field x -> u(lam x); its vorticity is lam * omega(lam x)."""
        return StreamField(self.terms, self.d, self.scale * lam)

    def on_grid(self, grid: CylGrid) -> tuple[VectorFieldRZ, ScalarField]:
        R, Z = grid.mesh()
        ur, uz = self.velocity(R, Z)
        return VectorFieldRZ(grid, ur, uz), ScalarField(grid, self.vorticity(R, Z))


def gaussian_example(d: int = 4) -> StreamField:
    """phi = z exp(-r^2 - z^2); for d = 4 this is the closed-form test field."""
    return StreamField((StreamTerm(1.0, 0, 1, 1.0, 1.0, 0.0),), d)


def random_field(rng: np.random.Generator, d: int = 4) -> StreamField:
    terms = []
    for _ in range(int(rng.integers(1, 4))):
        terms.append(StreamTerm(
            amp=float(rng.choice([-1.0, 1.0]) * rng.uniform(0.2, 1.0)),
            k=2 * int(rng.integers(0, 3)),
            n=int(rng.integers(0, 2)),
            alpha=float(rng.uniform(0.6, 2.5)),
            beta=float(rng.uniform(0.6, 2.5)),
            center=float(rng.uniform(-1.0, 1.0)),
        ))
    return StreamField(tuple(terms), d)


def random_corpus(size: int, seed: int, d: int = 4) -> list[StreamField]:
    rng = np.random.default_rng(seed)
    return [random_field(rng, d) for _ in range(size)]


def corpus_grid(resolution: int = 128) -> CylGrid:
    """Grid large enough that every corpus field has decayed below 1e-5 of its peak."""
    return CylGrid(6.0, -7.0, 7.0, resolution, int(round(resolution * 14 / 6)))
