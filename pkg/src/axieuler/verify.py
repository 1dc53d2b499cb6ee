"""Numerical certificates for the kernel, Lorentz-space and stretching bounds.

Each check returns a :class:`VerifyReport`.  Corpus constants (the largest
observed stretching ratio and Lorentz pairing ratio) are stored in a
baseline file so later runs act as regression tests.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .biot_savart import stretching_ratio, product_constant, velocity_bound_rhs
from .corpus import corpus_grid, random_corpus
from .kernel import H_closed, H_quad
from .lorentz import WeightedSamples, holder_pairing, weak_norm_of_g

SQRT_8PI = math.sqrt(8.0 * math.pi)
PROBES = np.array([(r, z) for r in (0.3, 0.7, 1.1, 1.6, 2.2) for z in (-1.3, -0.4, 0.2, 0.9, 1.7)])
CHECKS = ("h-identity", "h-bounds", "g-weak-norm", "holder", "velocity-bound", "stretching")


@dataclass
class VerifyReport:
    name: str
    status: str
    measured: float
    bound: float
    tolerance: float
    kind: str = "le"
    meta: dict = field(default_factory=dict)

    @classmethod
    def inequality(cls, name, measured, bound, tolerance, **meta):
        ok = measured <= bound * (1.0 + tolerance)
        return cls(name, "pass" if ok else "fail", float(measured), float(bound), tolerance, "le", meta)

    @classmethod
    def equality(cls, name, measured, expected, tolerance, **meta):
        ok = abs(measured - expected) <= tolerance
        return cls(name, "pass" if ok else "fail", float(measured), float(expected), tolerance, "eq", meta)

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def line(self) -> str:
        rel = "<=" if self.kind == "le" else "=="
        return (f"{self.status.upper():4s} {self.name:16s} measured={self.measured:.10g} {rel} "
                f"{self.bound:.10g} (tol {self.tolerance:g})")


def baseline_path() -> Path:
    return Path(str(resources.files("axieuler") / "data" / "baseline.json"))


def load_baseline(path=None) -> dict:
    return json.loads(Path(path or baseline_path()).read_text(encoding="utf-8"))


def check_h_identity(n: int = 10_000) -> VerifyReport:
    s = np.linspace(0.0, 0.99, n)
    err = float(np.abs(H_closed(s) - H_quad(s, 64)).max())
    return VerifyReport.equality("h-identity", err, 0.0, 1e-10, samples=n, order=64)


def check_h_bounds(n: int = 10_000) -> VerifyReport:
    s = np.linspace(0.0, 0.999, n)
    h = H_closed(s)
    violations = int(np.sum(h < 0) + np.sum(h > 4 * s / (1 - s)) + np.sum(np.diff(h) < 0))
    return VerifyReport.inequality("h-bounds", violations, 0, 0.0, samples=n)


def check_g_weak_norm(resolution: int = 2048, extent: float = 8.0) -> VerifyReport:
    value = weak_norm_of_g(1.0, 0.0, resolution, extent)
    return VerifyReport.inequality("g-weak-norm", value, SQRT_8PI, 0.02, resolution=resolution, extent=extent)


def random_simple_pair(rng: np.random.Generator) -> tuple[WeightedSamples, WeightedSamples]:
    n = int(rng.integers(1, 200))
    w = rng.uniform(0.01, 2.0, n)
    levels = rng.uniform(0, 3, int(rng.integers(1, 8)))
    f = rng.choice(levels, n) * (rng.random(n) < 0.8)
    g = rng.exponential(1.0, n) * (rng.random(n) < 0.8)
    return WeightedSamples(f, w), WeightedSamples(g, w)


def holder_constant(trials: int, seed: int) -> float:
    """Largest lhs / rhs of the Lorentz pairing over random simple functions."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        lhs, rhs = holder_pairing(*random_simple_pair(rng))
        if rhs > 0:
            worst = max(worst, lhs / rhs)
    return worst


def check_holder(trials: int = 1000, seed: int = 0) -> VerifyReport:
    return VerifyReport.inequality("holder", holder_constant(trials, seed), 1.0, 0.0, trials=trials, seed=seed)


def velocity_bound_ratios(fields, grid, probes=PROBES) -> np.ndarray:
    """|u_r| / rhs of the pointwise bound, per field and probe."""
    out = np.zeros((len(fields), len(probes)))
    for i, f in enumerate(fields):
        _, omega = f.on_grid(grid)
        ur, _ = f.velocity(probes[:, 0], probes[:, 1])
        for k, p in enumerate(probes):
            rhs = velocity_bound_rhs(omega, p)
            out[i, k] = abs(ur[k]) / rhs if rhs > 0 else (0.0 if ur[k] == 0 else math.inf)
    return out


def check_velocity_bound(corpus_size: int = 50, seed: int = 0, resolution: int = 128) -> VerifyReport:
    fields = random_corpus(corpus_size, seed)
    ratios = velocity_bound_ratios(fields, corpus_grid(resolution))
    return VerifyReport.inequality("velocity-bound", float(ratios.max()), 1.0, 0.05,
                                   corpus_size=corpus_size, seed=seed, resolution=resolution,
                                   probes=len(PROBES))


def stretching_ratios(fields, grid) -> np.ndarray:
    return np.array([stretching_ratio(*f.on_grid(grid)).ratio for f in fields])


def check_stretching(corpus_size: int = 50, seed: int = 0, resolution: int = 128,
                     baseline: dict | None = None) -> VerifyReport:
    ratios = stretching_ratios(random_corpus(corpus_size, seed), corpus_grid(resolution))
    measured = float(ratios.max()) if np.all(np.isfinite(ratios)) else math.inf
    bound = 2.0 * baseline["c_est"] if baseline else math.inf
    return VerifyReport.inequality("stretching", measured, bound, 0.0, corpus_size=corpus_size,
                                   seed=seed, resolution=resolution)


def run_checks(names=None, resolution: int = 2048, corpus_size: int = 50, seed: int = 0,
               baseline: dict | None = None) -> list[VerifyReport]:
    names = list(names or CHECKS)
    unknown = set(names) - set(CHECKS)
    if unknown:
        raise ValueError(f"unknown check(s): {', '.join(sorted(unknown))}")
    runners = {
        "h-identity": lambda: check_h_identity(),
        "h-bounds": lambda: check_h_bounds(),
        "g-weak-norm": lambda: check_g_weak_norm(resolution),
        "holder": lambda: check_holder(20 * corpus_size, seed),
        "velocity-bound": lambda: check_velocity_bound(corpus_size, seed),
        "stretching": lambda: check_stretching(corpus_size, seed, baseline=baseline),
    }
    return [runners[n]() for n in names]


def make_baseline(corpus_size: int = 50, seed: int = 0, resolution: int = 128) -> dict:
    ratios = stretching_ratios(random_corpus(corpus_size, seed), corpus_grid(resolution))
    c_h = holder_constant(20 * corpus_size, seed)
    return {
        "c_est": float(ratios.max()),
        "c_holder_est": c_h,
        "product_constant": product_constant(c_h),
        "corpus_size": corpus_size,
        "seed": seed,
        "resolution": resolution,
    }


def reports_json(reports, **meta) -> str:
    doc = {"meta": meta, "checks": [asdict(r) for r in reports]}
    return json.dumps(doc, indent=2, sort_keys=True)
