import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.sparse.linalg import expm_multiply

from ibc1d import oracle
from ibc1d.numerics import integrate
from ibc1d.single_source import (Coupling, free_kernel, k00, k10, k11, propagator,
                                 propagator_short_time)


def test_k00_at_small_time():
    assert abs(k00(1.0, 1e-8) - 1) < 1e-6


def test_k00_against_spectral_integral(frozen):
    for row in frozen["k00"]:
        ref = complex(float(row["re"]), float(row["im"]))
        assert abs(k00(float(row["c"]), float(row["t"])) - ref) < 1e-13


def test_k00_long_time_exponent():
    kap = Coupling(1.0).kappa
    res = lambda t: abs(k00(1.0, t) - 2 / 3 * np.exp(1j * kap**2 * t))
    ratio = res(200.0) / res(50.0)
    assert abs(ratio / 4 ** (-1.5) - 1) < 0.2


def test_vacuum_decay_endpoint():
    assert abs(abs(k00(1.0, 500.0)) ** 2 - 4 / 9) < 0.01


@pytest.mark.parametrize("t", [0.1, 1.0, 10.0])
def test_vacuum_norm_conservation(t):
    w = integrate(lambda x: abs(k10(1.0, x, t)) ** 2, -np.inf, np.inf, points=[0.0],
                  tol=1e-10, limit=2000)
    assert abs(abs(k00(1.0, t)) ** 2 + w - 1) < 1e-6


@settings(max_examples=30, deadline=None)
@given(st.floats(0.05, 20), st.floats(0.1, 3), st.floats(0.0, 2 * math.pi))
def test_kernel_ibc_and_vacuum_equation(t, r, phase):
    c = r * np.exp(1j * phase)
    h = 1e-5
    # K00 = (2/c) d/dx K10 at 0+, and i dK00/dt = conj(c) K10(0)
    dk10 = (-3 * k10(c, 0.0, t) + 4 * k10(c, h, t) - k10(c, 2 * h, t)) / (2 * h)
    assert abs(2 * dk10 / c - k00(c, t)) < 1e-5
    dt = 1e-5 * t
    dk00 = (k00(c, t + dt) - k00(c, t - dt)) / (2 * dt)
    assert abs(1j * dk00 - np.conj(c) * k10(c, 0.0, t)) < 1e-5 * max(1, abs(dk00))


@settings(max_examples=30, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(0.05, 5))
def test_k11_symmetric(x, y, t):
    assert abs(k11(1.0, x, y, t) - k11(1.0, y, x, t)) < 1e-13 * max(1, abs(k11(1.0, x, y, t)))


def test_k11_short_time_diffractive_term():
    c, x, y = 1.0, 0.7, -0.4
    for t in (1e-3, 5e-4):
        ex = propagator(c, t, x, y)
        sh = propagator_short_time(c, t, x, y)
        diff_ex = ex.k11 - free_kernel(x, y, t)
        diff_sh = sh.k11 - free_kernel(x, y, t)
        assert abs(diff_ex / diff_sh - 1) < 20 * t


def test_k10_short_time_prefactor():
    c, x = 1.0, 0.8
    for t in (1e-3, 5e-4):
        ex = propagator(c, t, x, 0.3)
        sh = propagator_short_time(c, t, x, 0.3)
        assert abs(ex.k10 / sh.k10 - 1) < 20 * t
        ex, sh = propagator(c, t, 0.3, x), propagator_short_time(c, t, 0.3, x)
        assert abs(ex.k01 / sh.k01 - 1) < 20 * t


def test_propagator_rejects_bad_input():
    with pytest.raises(ValueError):
        propagator(1.0, 0.0, 0.1, 0.2)
    with pytest.raises(ValueError):
        propagator(0.0, 1.0, 0.1, 0.2)


def test_k11_far_from_source_finite():
    v = k11(1.0, 300.0, 250.0, 0.3)
    assert np.isfinite(v)
    assert abs(v - free_kernel(300.0, 250.0, 0.3)) < 1e-3


def test_kernel_matches_crank_nicolson():
    r = oracle.kernel_vs_pde(1.0, 0.7, 0.5, -0.3, 0.2, 0.01)
    assert abs(r["extrapolated"] - r["exact"]) < 1e-3
    assert abs(r["fine"] - r["exact"]) < abs(r["coarse"] - r["exact"])


def test_group_property_on_lattice():
    m = oracle.line_lattice(0.8 - 0.3j, 10.0, 0.05)
    H = -1j * m.symmetric().astype(complex)
    rng = np.random.default_rng(3)
    psi = rng.normal(size=m.dim) + 1j * rng.normal(size=m.dim)
    psi /= np.linalg.norm(psi)
    a = expm_multiply(H * 0.4, expm_multiply(H * 0.3, psi))
    b = expm_multiply(H * 0.7, psi)
    assert np.linalg.norm(a - b) < 1e-6
