"""Lagrangian vortex-particle transport of eta = omega / r^(d-2).

Each particle carries a fixed eta_i and a fixed measure w_i (its initial
cell volume under r^(d-2) dr dz, conserved because the flow map preserves
that measure).  Only positions move.  Vorticity is recovered on the fly as
omega_i = eta_i r_i^(d-2), so a particle acts as a source of strength
omega_i * r_i^(d-2) * area_i = eta_i r_i^(d-2) w_i.
"""

from __future__ import annotations

import dataclasses
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .biot_savart import source_sum
from .fields import CylGrid, ScalarField, check_dim, gaussian_vorticity
from .kernel import KernelParams
from .lorentz import WeightedSamples, lorentz_quasinorm

log = logging.getLogger(__name__)

PRESETS = ("gaussian-example", "single-ring", "colliding-rings")
RING_WIDTH2 = 0.04


class SimulationError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class ParticleSet:
    positions: np.ndarray
    eta: np.ndarray
    volume: np.ndarray
    d: int = 4
    paired: bool = False

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=float).reshape(-1, 2)
        if not (len(pos) == len(self.eta) == len(self.volume)):
            raise ValueError("positions, eta and volume must be index-aligned")
        if np.any(pos[:, 0] <= 0):
            raise ValueError("particles must stay off the axis (r > 0)")
        if self.paired and len(pos) % 2:
            raise ValueError("a paired set needs an even particle count")
        check_dim(self.d)
        object.__setattr__(self, "positions", pos)

    def __len__(self):
        return len(self.eta)

    @property
    def r(self) -> np.ndarray:
        return self.positions[:, 0]

    @property
    def z(self) -> np.ndarray:
        return self.positions[:, 1]

    def omega(self) -> np.ndarray:
        return self.eta * self.r ** (self.d - 2)

    def strength(self) -> np.ndarray:
        return self.omega() * self.volume

    def moved(self, positions: np.ndarray) -> "ParticleSet":
        return dataclasses.replace(self, positions=positions)


def _mirror_order(grid: CylGrid) -> np.ndarray:
    """Flat node indices with each (i, j) followed by its mirror (i, nz-1-j)."""
    nz = grid.nz
    out = []
    for i in range(grid.nr):
        for j in range(nz // 2):
            out += [i * nz + j, i * nz + nz - 1 - j]
        if nz % 2:
            out.append(i * nz + nz // 2)
    return np.array(out, dtype=np.int64)


def init_from_vorticity(omega0: ScalarField, d: int = 4, drop: float = 1e-14) -> ParticleSet:
    """One particle per retained cell centre.

    Cells with |omega| <= drop * max|omega| are skipped.  On a z-symmetric
    grid with mirror-symmetric |omega| the particles are stored as adjacent
    mirror pairs, which the velocity sum exploits for exact symmetry.
    """
    d = check_dim(d)
    g = omega0.grid
    R, Z = g.mesh()
    w = omega0.values
    top = np.abs(w).max()
    keep = (np.abs(w) > drop * top).ravel() if top > 0 else np.zeros(g.size, bool)
    order = np.arange(g.size)
    paired = False
    if g.z_symmetric and g.nz % 2 == 0:
        mirrored = keep.reshape(g.shape)[:, ::-1].ravel()
        if np.array_equal(keep, mirrored):
            order = _mirror_order(g)
            paired = True
    idx = order[keep[order]]
    rr, zz = R.ravel()[idx], Z.ravel()[idx]
    vol = rr ** (d - 2) * (g.hr * g.hz)
    eta = w.ravel()[idx] / rr ** (d - 2)
    return ParticleSet(np.column_stack([rr, zz]), eta, vol, d, paired and idx.size > 0)


def particle_velocity(particles: ParticleSet, targets: np.ndarray, kernel: KernelParams,
                      skip_self: bool = False) -> np.ndarray:
    """Regularised direct-sum velocities at ``targets`` as an (n, 2) array.

    ``skip_self`` means targets are the particles themselves and a particle's
    own contribution is left out.
    """
    if not kernel.epsilon > 0:
        raise ValueError("particle sources need epsilon > 0")
    targets = np.asarray(targets, dtype=float).reshape(-1, 2)
    if len(particles) == 0:
        return np.zeros_like(targets)
    params = dataclasses.replace(kernel, d=particles.d)
    ur, uz = source_sum(targets, particles.r, particles.z, particles.strength(), params,
                        skip_self=skip_self, paired=particles.paired)
    return np.column_stack([ur, uz])


def _self_velocity(p: ParticleSet, kernel: KernelParams) -> np.ndarray:
    return particle_velocity(p, p.positions, kernel, skip_self=True)


def _reflect(positions: np.ndarray) -> tuple[np.ndarray, int]:
    bad = positions[:, 0] <= 0
    n = int(bad.sum())
    if n:
        positions = positions.copy()
        positions[bad, 0] = np.abs(positions[bad, 0])
        positions[bad & (positions[:, 0] == 0), 0] = np.finfo(float).tiny
    return positions, n


def step_rk4(particles: ParticleSet, dt: float, kernel: KernelParams) -> tuple[ParticleSet, int]:
    """One classical Runge-Kutta step of the particle positions.

    Returns the new set and the number of axis reflections applied.  A
    negative dt integrates backwards.
    """
    if dt == 0:
        raise ValueError("dt must be nonzero")
    if len(particles) == 0:
        return particles, 0
    x0 = particles.positions
    reflections = 0

    def stage(x):
        nonlocal reflections
        x, n = _reflect(x)
        reflections += n
        return _self_velocity(particles.moved(x), kernel)

    k1 = stage(x0)
    k2 = stage(x0 + 0.5 * dt * k1)
    k3 = stage(x0 + 0.5 * dt * k2)
    k4 = stage(x0 + dt * k3)
    x1, n = _reflect(x0 + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4))
    return particles.moved(x1), reflections + n


# -- presets ---------------------------------------------------------------


def _bump(r, z, zc):
    return np.exp(-((r - 1.0) ** 2 + (z - zc) ** 2) / RING_WIDTH2)


def preset_initial_data(name: str, grid: CylGrid) -> ScalarField:
    R, Z = grid.mesh()
    if name == "gaussian-example":
        return ScalarField(grid, gaussian_vorticity(R, Z))
    if name == "single-ring":
        return ScalarField(grid, _bump(R, Z, 0.0))
    if name == "colliding-rings":
        return ScalarField(grid, _bump(R, Z, 0.5) - _bump(R, Z, -0.5))
    raise ValueError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")


# -- driver ----------------------------------------------------------------


@dataclass
class SimulationConfig:
    grid: CylGrid
    d: int = 4
    preset: str | None = "single-ring"
    initial: ScalarField | None = None
    dt: float = 0.02
    t_end: float = 1.0
    kernel: KernelParams = field(default_factory=lambda: KernelParams(epsilon=0.1))
    diagnostics_every: int = 1
    seed: int = 0
    c_est: float | None = None
    snapshot_every: int = 0
    drop: float = 1e-14

    def __post_init__(self):
        check_dim(self.d)
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if not self.t_end >= self.dt:
            raise ValueError("t_end must be >= dt")
        if self.diagnostics_every < 1:
            raise ValueError("diagnostics_every must be >= 1")
        if self.initial is None and self.preset not in PRESETS:
            raise ValueError(f"unknown preset {self.preset!r}")

    def initial_vorticity(self) -> ScalarField:
        return self.initial if self.initial is not None else preset_initial_data(self.preset, self.grid)

    @classmethod
    def from_json(cls, doc: dict, base: Path | None = None) -> "SimulationConfig":
        from .io import read_scalar_field

        g = doc["grid"]
        grid = CylGrid(float(g["r_max"]), float(g["z_min"]), float(g["z_max"]), int(g["nr"]), int(g["nz"]))
        initial = None
        if "initial_csv" in doc:
            path = Path(doc["initial_csv"])
            if base is not None and not path.is_absolute():
                path = base / path
            initial = read_scalar_field(path)
            grid = initial.grid
        d = int(doc.get("dimension", 4))
        eps = doc.get("epsilon")
        kernel = KernelParams(d=d, tau_order=int(doc.get("tau_order", 16)),
                              epsilon=float(eps) if eps is not None else 2.0 * max(grid.hr, grid.hz))
        return cls(grid=grid, d=d, preset=doc.get("preset"), initial=initial, dt=float(doc["dt"]),
                   t_end=float(doc["t_end"]), kernel=kernel,
                   diagnostics_every=int(doc.get("diagnostics_every", 1)), seed=int(doc.get("seed", 0)),
                   c_est=doc.get("c_est"), snapshot_every=int(doc.get("snapshot_every", 0)),
                   drop=float(doc.get("drop_threshold", 1e-14)))


@dataclass(frozen=True)
class DiagnosticsRecord:
    t: float
    omega_sup: float
    l21: float
    ur_over_r_sup: float
    envelope: float
    kinetic: float
    axis_reflections: int

    FIELDS = ("t", "omega_sup", "l21", "ur_over_r_sup", "envelope", "kinetic", "axis_reflections")

    def row(self) -> tuple:
        return tuple(getattr(self, f) for f in self.FIELDS)


def l21_of_particles(p: ParticleSet) -> float:
    """||omega / r^2||_{2,1} under r^(d-2) dr dz; for d = 4 the samples are
    |eta_i| on weights w_i and do not depend on the positions."""
    if len(p) == 0:
        return 0.0
    return lorentz_quasinorm(WeightedSamples(np.abs(p.eta) * p.r ** (p.d - 4), p.volume), (2, 1))


def envelope(omega_sup0: float, l21_0: float, c_est: float, t: float, d: int = 4) -> float:
    """||omega^0||_inf exp((d-2) C ||omega^0/r^2||_{2,1} t).

    (d-2) is the stretching coefficient in d_t omega + u.grad omega = (d-2)(u_r/r) omega,
    and C bounds sup|u_r/r| / ||omega/r^2||_{2,1}.
    """
    return omega_sup0 * math.exp((d - 2) * c_est * l21_0 * t)


def _diagnose(p: ParticleSet, vel: np.ndarray, t: float, env: float, reflections: int) -> DiagnosticsRecord:
    if len(p) == 0:
        return DiagnosticsRecord(t, 0.0, 0.0, 0.0, env, 0.0, reflections)
    return DiagnosticsRecord(
        t=t,
        omega_sup=float(np.abs(p.omega()).max()),
        l21=l21_of_particles(p),
        ur_over_r_sup=float(np.abs(vel[:, 0] / p.r).max()),
        envelope=env,
        kinetic=float(0.5 * np.sum(p.volume * (vel ** 2).sum(axis=1))),
        axis_reflections=reflections,
    )


def default_c_est() -> float:
    from .verify import load_baseline

    return float(load_baseline()["c_est"])


def run(config: SimulationConfig, snapshot=None) -> list[DiagnosticsRecord]:
    """Advance to t_end, returning a record every ``diagnostics_every`` steps.

    ``snapshot(step, particles)`` is called every ``snapshot_every`` steps
    when given.
    """
    particles = init_from_vorticity(config.initial_vorticity(), config.d, config.drop)
    eta0 = particles.eta.copy()
    kernel = dataclasses.replace(config.kernel, d=config.d)
    c_est = config.c_est if config.c_est is not None else default_c_est()
    nsteps = int(round(config.t_end / config.dt))
    h = max(config.grid.hr, config.grid.hz)

    vel = _self_velocity(particles, kernel) if len(particles) else np.zeros((0, 2))
    first = _diagnose(particles, vel, 0.0, 0.0, 0)
    umax = float(np.abs(vel).max()) if len(vel) else 0.0
    if umax > 0 and config.dt > 0.5 * h / umax:
        log.warning("dt=%g exceeds 0.5 h / max|u| = %g", config.dt, 0.5 * h / umax)
    omega0, l21_0 = first.omega_sup, first.l21
    records = [dataclasses.replace(first, envelope=envelope(omega0, l21_0, c_est, 0.0, config.d))]
    reflections = 0
    if snapshot and config.snapshot_every:
        snapshot(0, particles)
    for step in range(1, nsteps + 1):
        particles, n = step_rk4(particles, config.dt, kernel)
        reflections += n
        if not np.array_equal(particles.eta, eta0):
            raise SimulationError("transported values were modified")
        if snapshot and config.snapshot_every and step % config.snapshot_every == 0:
            snapshot(step, particles)
        if step % config.diagnostics_every and step != nsteps:
            continue
        t = step * config.dt
        vel = _self_velocity(particles, kernel) if len(particles) else np.zeros((0, 2))
        rec = _diagnose(particles, vel, t, envelope(omega0, l21_0, c_est, t, config.d), reflections)
        if not all(math.isfinite(v) for v in rec.row()):
            raise SimulationError("non-finite diagnostics at t=%g: %s" % (
                t, json.dumps(dataclasses.asdict(rec), default=str)))
        records.append(rec)
        if len(vel):
            umax = float(np.abs(vel).max())
            if umax > 0 and config.dt > 0.5 * h / umax:
                log.warning("t=%g: dt=%g exceeds 0.5 h / max|u| = %g", t, config.dt, 0.5 * h / umax)
    return records
