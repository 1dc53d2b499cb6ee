import math

import numpy as np
import pytest

from axieuler.biot_savart import (ReconstructionJob, axis_limit, reconstruct_on_grid, source_sum,
                                  stretching_ratio, product_constant, velocity_bound_rhs,
                                  velocity_from_vorticity)
from axieuler.corpus import gaussian_example
from axieuler.fields import CylGrid, ScalarField, VectorFieldRZ, gaussian_test_vorticity
from axieuler.kernel import KernelParams

PROBES = np.array([[0.5, 0.3], [1.0, -0.6], [1.6, 0.9]])


def test_job_validation():
    g = CylGrid(2.0, -2.0, 2.0, 8, 8)
    w = gaussian_test_vorticity(g)
    with pytest.raises(ValueError, match="outside"):
        ReconstructionJob(w, [[3.0, 0.0]], KernelParams(epsilon=0.1))
    with pytest.raises(ValueError, match="exclude_diagonal"):
        ReconstructionJob(w, [[1.0, 0.0]], KernelParams(epsilon=0.0))
    with pytest.raises(ValueError):
        ReconstructionJob(w, [[1.0, 0.0, 0.0]], KernelParams(epsilon=0.1))


def test_zero_vorticity_gives_zero_velocity():
    g = CylGrid(2.0, -2.0, 2.0, 8, 8)
    u = reconstruct_on_grid(ScalarField(g, np.zeros(g.shape)), KernelParams(epsilon=0.0))
    assert np.all(u.ur == 0) and np.all(u.uz == 0)


def test_fast_path_matches_general_rule():
    g = CylGrid(3.0, -3.0, 3.0, 32, 32)
    job = ReconstructionJob(gaussian_test_vorticity(g), PROBES, KernelParams(d=4, epsilon=0.1, tau_order=24))
    fast = velocity_from_vorticity(job, fast=True)
    slow = velocity_from_vorticity(job, fast=False)
    assert np.allclose(fast, slow, rtol=1e-8, atol=1e-12 * np.abs(fast).max())


@pytest.mark.parametrize("d", [3, 5])
def test_reconstruction_other_dimensions(d):
    """The d-dimensional analogue of the closed-form field is recovered; this
    pins the overall prefactor (d - 2) / (2 pi) for d != 4."""
    f = gaussian_example(d)
    g = CylGrid(3.5, -3.5, 3.5, 96, 192)
    _, w = f.on_grid(g)
    job = ReconstructionJob(w, PROBES, KernelParams(d=d, epsilon=0.5 * max(g.hr, g.hz)))
    u = velocity_from_vorticity(job, fast=False)
    ur, uz = f.velocity(PROBES[:, 0], PROBES[:, 1])
    exact = np.column_stack([ur, uz])
    assert np.abs(u - exact).max() / np.abs(exact).max() < 0.03


def test_mirror_paired_sum_is_exactly_antisymmetric():
    rng = np.random.default_rng(0)
    n = 40
    r = rng.uniform(0.2, 2.0, n)
    z = rng.uniform(0.1, 1.5, n)
    s = rng.standard_normal(n)
    sr = np.repeat(r, 2)
    sz = np.column_stack([z, -z]).ravel()
    st = np.column_stack([s, -s]).ravel()
    tgt = np.column_stack([sr, sz])
    ur, uz = source_sum(tgt, sr, sz, st, KernelParams(epsilon=0.05), skip_self=True, paired=True)
    assert np.array_equal(ur[0::2], ur[1::2])
    assert np.array_equal(uz[0::2], -uz[1::2])


def test_truncation_radii_drop_far_sources():
    sr, sz, st = np.array([1.0, 1.0]), np.array([0.0, 5.0]), np.array([1.0, 1.0])
    t = np.array([[1.0, 0.2]])
    near_only = source_sum(t, sr[:1], sz[:1], st[:1], KernelParams(epsilon=0.1))
    cut = source_sum(t, sr, sz, st, KernelParams(epsilon=0.1, z_cut=1.0))
    assert cut == near_only


def test_velocity_bound_rhs_dominates_closed_form():
    g = CylGrid(4.0, -4.0, 4.0, 128, 256)
    w = gaussian_test_vorticity(g)
    f = gaussian_example()
    for r, z in [(0.3, 0.2), (1.0, 1.0), (2.5, -1.1)]:
        assert abs(f.velocity(r, z)[0]) <= velocity_bound_rhs(w, (r, z))
    with pytest.raises(ValueError):
        velocity_bound_rhs(w, (0.0, 0.0))
    with pytest.raises(ValueError):
        velocity_bound_rhs(w, (1.0, 0.0), d=5)


def test_axis_limit_is_exact_for_quadratics():
    h = 0.1
    r = (np.arange(3) + 0.5) * h
    vals = 2.0 - 3.0 * r + 5.0 * r * r
    assert axis_limit(vals) == pytest.approx(2.0, abs=1e-14)


def test_stretching_ratio_edge_cases():
    g = CylGrid(2.0, -2.0, 2.0, 8, 8)
    zero = np.zeros(g.shape)
    res = stretching_ratio(VectorFieldRZ(g, zero, zero), ScalarField(g, zero))
    assert res.zero and res.ratio == 0.0
    with pytest.raises(ValueError):
        stretching_ratio(VectorFieldRZ(g, np.ones(g.shape), zero), ScalarField(g, zero))
    with pytest.raises(ValueError):
        stretching_ratio(VectorFieldRZ(g, zero, zero), ScalarField(g, zero), d=3)


def test_stretching_ratio_scale_invariance():
    f = gaussian_example()
    g = CylGrid(4.0, -4.0, 4.0, 64, 128)
    base = stretching_ratio(*f.on_grid(g)).ratio
    for lam in (0.5, 2.0):
        assert stretching_ratio(*f.rescaled(lam).on_grid(g.scaled(1 / lam))).ratio == pytest.approx(base, rel=1e-10)


def test_product_constant():
    assert product_constant(1.0) == pytest.approx(8 / math.pi * math.sqrt(8 * math.pi))
