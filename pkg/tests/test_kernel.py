import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from axieuler.kernel import UR, UZ, H_closed, H_quad, KernelParams, g_kernel, tau_kernel


def h_reference(s):
    return quad(lambda t: t / (1 - s * t) ** 2, -1, 1, epsabs=1e-15, epsrel=1e-12)[0]


def tau_reference(d, r, rb, dz, sign, eps=0.0):
    """Adaptive quadrature of the defining integral with the endpoint weight
    (1 - tau^2)^((d-4)/2) handled by the algebraic-weight rule."""
    a = (d - 4) / 2

    def f(t):
        num = t if sign == UR else r * t - rb
        return num / (r * r + rb * rb - 2 * r * rb * t + dz * dz + eps * eps) ** (d / 2)

    return quad(f, -1, 1, weight="alg", wvar=(a, a), epsabs=1e-15, epsrel=1e-12, limit=400)[0]


def test_h_known_values():
    assert H_closed(0.0) == 0.0
    assert H_closed(0.5) == pytest.approx(0.93888417866089, rel=1e-13)
    for s in (0.01, 0.2, 0.7, 0.95):
        assert H_closed(s) == pytest.approx(h_reference(s), rel=1e-11)


def test_h_small_s_branch_is_continuous():
    lo, hi = np.nextafter(0.1, 0), 0.1
    assert abs(H_closed(lo) - H_closed(hi)) < 1e-14
    s = np.linspace(0.01, 0.2, 2001)
    assert np.allclose(H_closed(s), H_quad(s), rtol=1e-13, atol=0)
    # the quadrature loses relative accuracy as s -> 0; use the leading Taylor terms there
    s = np.geomspace(1e-10, 1e-3, 50)
    assert np.allclose(H_closed(s), 4 / 3 * s + 8 / 5 * s ** 3 + 12 / 7 * s ** 5, rtol=1e-15, atol=0)


def test_h_slope_at_zero():
    assert H_closed(1e-9) / 1e-9 == pytest.approx(4 / 3, rel=1e-12)


@pytest.mark.parametrize("bad", [-0.1, 1.0, 1.5, math.nan])
def test_h_domain(bad):
    with pytest.raises(ValueError):
        H_closed(bad)
    with pytest.raises(ValueError):
        H_quad(bad)


def test_h_array_shapes():
    s = np.full((3, 4), 0.3)
    assert H_closed(s).shape == (3, 4)
    assert H_quad(s).shape == (3, 4)
    assert isinstance(H_quad(0.3), float)


@settings(max_examples=200, deadline=None)
@given(st.floats(0.0, 0.9999), st.floats(0.0, 0.9999))
def test_h_monotone_and_bounded(a, b):
    lo, hi = sorted((a, b))
    assert 0 <= H_closed(lo) <= H_closed(hi) + 1e-15
    assert H_closed(hi) <= 4 * hi / (1 - hi) * (1 + 1e-14)


@pytest.mark.parametrize("d", [3, 4, 5, 6])
@pytest.mark.parametrize("r,rb,dz", [(1.0, 0.5, 0.3), (0.2, 2.0, -1.0), (1.0, 1.05, 0.02), (3.0, 0.01, 0.5)])
@pytest.mark.parametrize("sign", [UR, UZ])
def test_tau_kernel_against_adaptive_quadrature(d, r, rb, dz, sign):
    got = tau_kernel(d, r, rb, dz, sign)
    ref = tau_reference(d, r, rb, dz, sign)
    assert got == pytest.approx(ref, rel=1e-8, abs=1e-12 * abs(tau_reference(d, r, rb, dz, UR)) + 1e-14)


def test_tau_kernel_d4_matches_closed_form():
    rng = np.random.default_rng(3)
    for _ in range(200):
        r, rb = rng.uniform(0.01, 3, 2)
        dz = rng.uniform(-2, 2)
        p = r * r + rb * rb + dz * dz
        s = 2 * r * rb / p
        assert tau_kernel(4, r, rb, dz, UR) == pytest.approx(H_closed(s) / p ** 2, rel=1e-10)


def test_tau_kernel_mollified_singular_pair():
    v = tau_kernel(4, 1.0, 1.0, 0.0, UR, epsilon=0.1)
    assert v == pytest.approx(tau_reference(4, 1.0, 1.0, 0.0, UR, eps=0.1), rel=1e-8)
    with pytest.raises(ValueError):
        tau_kernel(4, 1.0, 1.0, 0.0, UR)


def test_tau_kernel_rejects_bad_input():
    with pytest.raises(ValueError):
        tau_kernel(4, 1.0, 0.5, 0.1, sign="theta")
    with pytest.raises(ValueError):
        tau_kernel(4, -1.0, 0.5, 0.1)
    with pytest.raises(ValueError):
        tau_kernel(2, 1.0, 0.5, 0.1)
    with pytest.raises(ValueError):
        tau_kernel(4, 0.0, 0.0, 0.0, epsilon=0.1)


def test_g_kernel():
    assert g_kernel(1.0, 0.0, 0.0, 0.0) == pytest.approx(1.0)
    assert g_kernel(2.0, 1.0, 2.0, 4.0) == pytest.approx(1 / (math.sqrt(17) * 3))
    with pytest.raises(ValueError):
        g_kernel(1.0, 0.0, 1.0, 0.0)
    with pytest.raises(ValueError):
        g_kernel(0.0, 0.0, 1.0, 1.0)


def test_kernel_params_validation():
    KernelParams(d=3, tau_order=8, epsilon=0.1)
    for kw in ({"d": 2}, {"tau_order": 2}, {"epsilon": -1.0}, {"r_cut": 0.0}):
        with pytest.raises(ValueError):
            KernelParams(**kw)
