"""Lorentz quasinorms of sampled functions.

A sampled function is a finite list of (value, measure) pairs, i.e. a simple
function.  Its distribution function is a step function, so the defining
integral

    ||f||_{p,q} = p^(1/q) ( int_0^inf t^q mu(|f| > t)^(q/p) dt/t )^(1/q)

is a finite sum: with distinct values v_1 > ... > v_K > v_{K+1} = 0 and
cumulative measures M_k = mu(|f| >= v_k),

    int = sum_k M_k^(q/p) (v_k^q - v_{k+1}^q) / q.

No quadrature in t is involved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .fields import CylGrid, ScalarField, check_dim
from .kernel import g_kernel

INF = math.inf


@dataclass(frozen=True, eq=False)
class WeightedSamples:
    values: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        v = np.abs(np.asarray(self.values, dtype=float)).ravel()
        w = np.asarray(self.weights, dtype=float).ravel()
        if v.shape != w.shape:
            raise ValueError(f"values ({v.size}) and weights ({w.size}) differ in length")
        if not np.all(np.isfinite(v)):
            raise ValueError("values must be finite")
        if not np.all(w > 0) or not np.all(np.isfinite(w)):
            raise ValueError("weights must be positive and finite")
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "weights", w)

    def __len__(self):
        return self.values.size

    @classmethod
    def from_field(cls, field: ScalarField, d: int = 4) -> "WeightedSamples":
        return cls(field.values, field.grid.cell_weights(d))


@dataclass(frozen=True)
class LorentzExponents:
    p: float
    q: float = INF

    def __post_init__(self):
        if not self.p >= 1:
            raise ValueError(f"need p >= 1, got {self.p}")
        if not self.q >= 1:
            raise ValueError(f"need q >= 1 or INF, got {self.q}")


def _steps(samples: WeightedSamples) -> tuple[np.ndarray, np.ndarray]:
    """Distinct positive values (descending) and cumulative measures M_k.

    Sorting is by (value, weight) so the result is independent of the input
    order bit for bit.
    """
    keep = samples.values > 0
    v = samples.values[keep]
    w = samples.weights[keep]
    if v.size == 0:
        return v, w
    order = np.lexsort((-w, -v))
    v = v[order]
    cum = np.cumsum(w[order])
    last = np.flatnonzero(np.append(v[1:] != v[:-1], True))
    return v[last], cum[last]


def distribution_function(samples: WeightedSamples, tau: float) -> float:
    """mu({|f| > tau})."""
    if tau < 0:
        raise ValueError("tau must be non-negative")
    return float(samples.weights[samples.values > tau].sum())


def lorentz_quasinorm(samples: WeightedSamples, exps) -> float:
    if not isinstance(exps, LorentzExponents):
        exps = LorentzExponents(*exps)
    p, q = exps.p, exps.q
    if math.isinf(q):
        return weak_quasinorm(samples, p)
    v, m = _steps(samples)
    if v.size == 0:
        return 0.0
    vq = v ** q
    gaps = vq - np.append(vq[1:], 0.0)
    total = float(np.sum(m ** (q / p) * gaps)) / q
    return p ** (1.0 / q) * total ** (1.0 / q)


def weak_quasinorm(samples: WeightedSamples, p: float) -> float:
    """sup_t t mu(|f| > t)^(1/p); attained as t increases to a sample value."""
    if not p >= 1:
        raise ValueError(f"need p >= 1, got {p}")
    v, m = _steps(samples)
    if v.size == 0:
        return 0.0
    return float(np.max(v * m ** (1.0 / p)))


def lp_norm(samples: WeightedSamples, p: float) -> float:
    return float(np.sum(samples.values ** p * samples.weights)) ** (1.0 / p)


def holder_pairing(f: WeightedSamples, g: WeightedSamples) -> tuple[float, float]:
    """(|sum f g w|, ||g||_{2,1} ||f||_{2,inf}) for index-aligned samples.

    ``values`` hold magnitudes, so the left side is the integral of |f g|,
    which dominates any signed pairing.
    """
    if len(f) != len(g) or not np.array_equal(f.weights, g.weights):
        raise ValueError("f and g must be sampled on the same weights")
    lhs = float(np.sum(f.values * g.values * f.weights))
    return lhs, lorentz_quasinorm(g, (2, 1)) * weak_quasinorm(f, 2)


def half_plane_grid(a: float, b: float, resolution: int, extent: float) -> CylGrid:
    """resolution x resolution cells on (0, extent] x [b - extent, b + extent]."""
    return CylGrid(extent, b - extent, b + extent, resolution, resolution)


def g_samples(a: float, b: float, resolution: int, extent: float) -> WeightedSamples:
    """g_{a,b} on a cell-centred grid under r^2 dr dz.

    Cells whose closure contains the singular point (a, b) are dropped.
    """
    if not a > 0:
        raise ValueError(f"a must be positive, got {a}")
    grid = half_plane_grid(a, b, resolution, extent)
    r, z = grid.r, grid.z
    sing = (np.abs(r[:, None] - a) <= 0.5 * grid.hr) & (np.abs(z[None, :] - b) <= 0.5 * grid.hz)
    R, Z = grid.mesh()
    R, Z = R[~sing], Z[~sing]
    return WeightedSamples(g_kernel(a, b, R, Z), R * R * (grid.hr * grid.hz))


def weak_norm_of_g(a: float, b: float, resolution: int = 2048, extent: float = 8.0) -> float:
    """Measured ||g_{a,b}||_{L^{2,inf}(r^2 dr dz)} on a truncated half-plane."""
    if resolution < 64:
        raise ValueError("resolution must be >= 64")
    return weak_quasinorm(g_samples(a, b, resolution, extent), 2)


# -- nested truncations --------------------------------------------------


@dataclass
class TruncationSequence:
    radii: list[float]
    values: list[float]
    tol: float

    @property
    def steps(self) -> list[float]:
        v = self.values
        return [abs(v[k + 1] - v[k]) / v[k + 1] if v[k + 1] else 0.0 for k in range(len(v) - 1)]

    @property
    def converged(self) -> bool:
        if not self.values or not np.all(np.isfinite(self.values)):
            return False
        if self.values[-1] == 0:
            return True
        return bool(self.steps) and self.steps[-1] < self.tol

    @property
    def limit(self) -> float:
        return self.values[-1] if self.values else 0.0


def truncation_sequence(samples: WeightedSamples, radii: np.ndarray, norm, r0: float = 1.0,
                        growth: float = 2.0, tol: float = 1e-3) -> TruncationSequence:
    """Evaluate ``norm`` on nested balls R_k = r0 growth^k until two successive
    values differ by less than ``tol`` (relative) or the samples run out."""
    radii = np.asarray(radii, dtype=float)
    rmax = float(radii.max()) if radii.size else 0.0
    seq = TruncationSequence([], [], tol)
    R = r0
    while True:
        keep = radii <= R
        sub = WeightedSamples(samples.values[keep], samples.weights[keep])
        seq.radii.append(R)
        seq.values.append(norm(sub))
        if R >= rmax or (len(seq.values) > 1 and seq.converged):
            return seq
        R *= growth


@dataclass
class IntersectionReport:
    p: float
    q: float
    r: float
    lp: TruncationSequence
    lq1: TruncationSequence
    lr: TruncationSequence

    @property
    def ok(self) -> bool:
        """The L^p and L^r norms settle whenever the L^{q,1} norm does."""
        if not self.lq1.converged:
            return True
        return self.lp.converged and self.lr.converged


def intersection_check(samples: WeightedSamples, p: float, q: float, r: float, radii=None,
                       r0: float = 1.0, tol: float = 1e-3) -> IntersectionReport:
    """L^p, L^{q,1} and L^r norms on nested truncations (p < q < r).

    ``radii`` gives each sample's distance from the origin; without it the
    whole sample set is a single truncation.
    """
    if not 1 <= p < q < r:
        raise ValueError(f"need 1 <= p < q < r, got ({p}, {q}, {r})")
    if radii is None:
        radii = np.zeros(len(samples))
    seqs = [truncation_sequence(samples, radii, norm, r0=r0, tol=tol)
            for norm in (lambda s: lp_norm(s, p), lambda s: lorentz_quasinorm(s, (q, 1)),
                         lambda s: lp_norm(s, r))]
    return IntersectionReport(p, q, r, *seqs)


# -- decay hypothesis ----------------------------------------------------


def geometric_half_plane(rho_min: float = 1e-6, rho_max: float = 2.0 ** 24,
                         cells_per_octave: int = 24) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Log-polar cells covering the half-plane r > 0 out to ``rho_max``.

    Returns (r, z, area) at cell centres; area is the exact (rho, theta)
    cell area.  Used for integrals whose integrands only decay like a power.
    """
    n_rho = int(np.ceil(np.log2(rho_max / rho_min) * cells_per_octave))
    edges = rho_min * (rho_max / rho_min) ** (np.arange(n_rho + 1) / n_rho)
    n_th = 4 * cells_per_octave
    th_edges = np.linspace(-0.5 * np.pi, 0.5 * np.pi, n_th + 1)
    rho = np.sqrt(edges[:-1] * edges[1:])
    th = 0.5 * (th_edges[:-1] + th_edges[1:])
    area = 0.5 * np.diff(edges ** 2)[:, None] * np.diff(th_edges)[None, :]
    RHO, TH = np.meshgrid(rho, th, indexing="ij")
    area = np.broadcast_to(area, RHO.shape)
    return (RHO * np.cos(TH)).ravel(), (RHO * np.sin(TH)).ravel(), area.ravel().copy()


@dataclass
class DecayReport:
    passed: bool
    reason: str
    c_axis: float = 0.0
    c_decay: float = 0.0
    c_interp: float = 0.0
    l74: TruncationSequence | None = None
    l178: TruncationSequence | None = None
    l21: float = 0.0
    details: dict = field(default_factory=dict)


def _boundary_dominated(vals: np.ndarray) -> bool:
    """True when the sup over the grid is reached in the outer ring of cells
    (r = r_max, z = z_min or z = z_max), i.e. the samples do not decay."""
    top = vals.max()
    if top == 0:
        return False
    edge = max(vals[-1, :].max(), vals[:, 0].max(), vals[:, -1].max())
    return bool(edge >= 0.5 * top)


def majorant(r, z):
    """r^(-4/3) (1 + r^2 + z^2)^(-2/3), the interpolated pointwise bound."""
    return r ** (-4.0 / 3.0) * (1.0 + r * r + z * z) ** (-2.0 / 3.0)


def axis_resolved_samples(omega: ScalarField, sub: int = 4, per_octave: int = 16,
                          octaves: int = 48) -> WeightedSamples:
    """Samples of |omega| / r^2 on r^2 dr dz that resolve the 1/r growth at the axis.

    Cell-centre sampling caps omega / r^2 near r = h/2 and converges only
    like h^(1/2) in L^(2,1).  Instead each off-axis cell is split into
    ``sub`` strips in r with omega interpolated linearly, and the axis
    column is split geometrically (``per_octave`` strips per halving down to
    2^-octaves h) with omega continued linearly to zero at r = 0.
    """
    g = omega.grid
    w0 = omega.values
    h = g.hr
    vals, wts = [], []
    if g.nr > 1:
        slope = np.gradient(w0, h, axis=0, edge_order=2 if g.nr > 2 else 1)[1:]
        rc = g.r[1:, None]
        for k in range(sub):
            lo = rc + (k / sub - 0.5) * h
            hi = lo + h / sub
            mid = 0.5 * (lo + hi)
            om = w0[1:] + slope * (mid - rc)
            vals.append((np.abs(om) / mid ** 2).ravel())
            wts.append(np.broadcast_to((hi ** 3 - lo ** 3) / 3.0 * g.hz, om.shape).ravel())
    c = np.abs(w0[0]) / g.r[0]
    edges = h * 2.0 ** (-np.arange(per_octave * octaves + 1) / per_octave)
    hi, lo = edges[:-1, None], edges[1:, None]
    vals.append((c[None, :] / np.sqrt(hi * lo)).ravel())
    wts.append(np.broadcast_to((hi ** 3 - lo ** 3) / 3.0 * g.hz, (hi.size, g.nz)).ravel())
    return WeightedSamples(np.concatenate(vals), np.concatenate(wts))


def decay_hypothesis_check(omega: ScalarField, d: int = 4, tol: float = 1e-3) -> DecayReport:
    """Check |omega / r^2| <= C / r and <= C / (r^2 (1 + r^2 + z^2)^2).

    The two constants are fitted on the samples, the interpolated majorant
    C_a^(2/3) C_b^(1/3) / (r^(4/3) (1 + r^2 + z^2)^(2/3)) is integrated in
    L^(7/4) and L^(17/8) over the full half-plane on nested truncations,
    and ||omega / r^2||_{2,1} is computed from :func:`axis_resolved_samples`.
    """
    if check_dim(d) != 4:
        raise ValueError("the decay check is formulated for d = 4")
    R, Z = omega.grid.mesh()
    a = np.abs(omega.values)
    axis_fit = a / R
    decay_fit = a * (1.0 + R * R + Z * Z) ** 2
    l21 = lorentz_quasinorm(axis_resolved_samples(omega), (2, 1))
    if _boundary_dominated(axis_fit) or _boundary_dominated(decay_fit):
        return DecayReport(False, "majorant fit fails: samples do not decay toward the grid boundary",
                           l21=l21)
    c_axis, c_decay = float(axis_fit.max()), float(decay_fit.max())
    c = c_axis ** (2.0 / 3.0) * c_decay ** (1.0 / 3.0)
    if c == 0:
        zero = TruncationSequence([1.0], [0.0], tol)
        return DecayReport(True, "zero field", l74=zero, l178=zero, l21=l21)
    r, z, area = geometric_half_plane()
    samples = WeightedSamples(c * majorant(r, z), r * r * area)
    radii = np.hypot(r, z)
    l74 = truncation_sequence(samples, radii, lambda s: lp_norm(s, 7 / 4), tol=tol)
    l178 = truncation_sequence(samples, radii, lambda s: lp_norm(s, 17 / 8), tol=tol)
    ok = l74.converged and l178.converged and np.isfinite(l21)
    return DecayReport(ok, "ok" if ok else "majorant norms did not settle", c_axis, c_decay, c,
                       l74, l178, l21)
