import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ibc1d.numerics import (Bracket, IntegrationError, RootFindingError, damped_integral,
                            erfc_complex, erfcx_complex, integrate, integrate_fourier,
                            richardson, solve_root)

finite = st.floats(-30, 30, allow_nan=False)


def mp_erfc(z):
    with mpmath.workdps(40):
        return complex(mpmath.erfc(mpmath.mpc(z.real, z.imag)))


def test_erfc_origin():
    assert erfc_complex(0j) == 1


def test_erfc_reflection_point():
    z = 1.3 + 0.7j
    assert abs(erfc_complex(-z) - (2 - erfc_complex(z))) < 1e-14


def test_erfc_real_against_mpmath():
    assert abs(erfc_complex(2.0 + 0j) - mp_erfc(2.0)) < 1e-15


@settings(max_examples=300, deadline=None)
@given(finite, finite)
def test_erfc_relative_error(x, y):
    z = complex(x, y)
    if abs(z) > 30:
        return
    # only where the value is representable
    with mpmath.workdps(40):
        ref = mpmath.erfc(mpmath.mpc(x, y))
        if not (mpmath.mpf("1e-300") < abs(ref) < mpmath.mpf("1e300")):
            return
        ref = complex(ref)
    got = erfc_complex(z)
    assert abs(got - ref) <= 1e-13 * abs(ref)


@settings(max_examples=100, deadline=None)
@given(st.floats(-10, 10), st.floats(-10, 10))
def test_erfc_symmetries(x, y):
    z = complex(x, y)
    if abs(z) > 10 or abs(x * x - y * y) > 600:
        return
    a, b = erfc_complex(z), erfc_complex(-z)
    assert abs(a + b - 2) <= 1e-12 * max(1.0, abs(a), abs(b))
    assert abs(erfc_complex(z.conjugate()) - a.conjugate()) <= 1e-13 * max(1.0, abs(a))


def test_erfcx_large_argument_on_diagonal():
    # the propagator argument direction e^{-i pi/4}
    z = 25 * np.exp(-0.25j * math.pi)
    with mpmath.workdps(40):
        ref = complex(mpmath.exp(mpmath.mpc(z.real, z.imag) ** 2)
                      * mpmath.erfc(mpmath.mpc(z.real, z.imag)))
    assert abs(erfcx_complex(z) - ref) < 1e-13 * abs(ref)


def test_erfc_overflow_is_signalled():
    with pytest.raises(OverflowError):
        erfc_complex(1 + 30j)
    assert np.isfinite(erfc_complex(1 + 30j, scaled=True))


def test_solve_root_sqrt2():
    assert abs(solve_root(lambda x: x * x - 2, Bracket(1, 2), tol=1e-14) - math.sqrt(2)) < 1e-14


def test_solve_root_ground_kappa():
    r = solve_root(lambda k: 2 * k**3 - 1, Bracket(0.1, 2))
    assert abs(r - 2 ** (-1 / 3)) < 1e-14


def test_solve_root_against_mpmath():
    with mpmath.workdps(50):
        ref = mpmath.findroot(lambda k: 2 * k * (k * k - 4) - 1, (2, 3), solver="bisect")
    r = solve_root(lambda k: 2 * k * (k * k - 4) - 1, Bracket(2, 3), tol=1e-15)
    assert abs(r - float(ref)) < 1e-14


def test_solve_root_errors():
    with pytest.raises(RootFindingError):
        solve_root(lambda x: x * x + 1, Bracket(-1, 1))
    with pytest.raises(ValueError):
        Bracket(2, 1)


@settings(max_examples=60, deadline=None)
@given(st.floats(-50, 50), st.floats(1e-3, 10))
def test_solve_root_brackets_sign_change(root, width):
    f = lambda x: math.atan(x - root)
    r = solve_root(f, Bracket(root - width, root + 2 * width), tol=1e-12)
    assert abs(r - root) <= 1e-12 * max(1, abs(root)) + 1e-15


def test_integrate_exponential():
    assert abs(integrate(lambda x: math.exp(-x), 0, np.inf) - 1) < 1e-12


def test_integrate_ground_particle_weight():
    kap = 2 ** (-1 / 3)
    val = integrate(lambda x: kap / 3 * math.exp(-2 * kap * abs(x)), -np.inf, np.inf,
                    points=[0.0])
    assert abs(val - 1 / 3) < 1e-12


def test_integrate_scattering_vacuum_weight():
    kap = 2 ** (-1 / 3)
    val = integrate(lambda k: k * k * kap**3 / (k**6 + kap**6) / math.pi, -np.inf, np.inf,
                    points=[0.0])
    assert abs(val - 1 / 3) < 1e-12


@settings(max_examples=40, deadline=None)
@given(st.floats(-3, 3), st.floats(0.05, 3))
def test_integrate_gaussian(mu, s):
    f = lambda x: math.exp(-((x - mu) ** 2) / (2 * s * s))
    val, err = integrate(f, -np.inf, np.inf, points=[mu], full_output=True)
    assert abs(val - s * math.sqrt(2 * math.pi)) <= max(err, 1e-12) * 10


def test_integrate_reports_failure():
    with pytest.warns(Warning), pytest.raises(IntegrationError) as e:
        integrate(lambda x: math.sin(1 / x) / x, 1e-9, 1, tol=1e-14, limit=20)
    assert np.isfinite(e.value.estimate) and e.value.error > 1e-14


def test_integrate_fourier_slow_tail():
    # int_0^inf cos(wk)/(1+k^2) dk = pi/2 e^{-w}
    w = 1.7
    val = integrate_fourier(lambda k: 1 / (1 + k * k), w, "cos")
    assert abs(val - math.pi / 2 * math.exp(-w)) < 1e-11


def test_damped_integral_oscillatory():
    val = damped_integral(lambda k: math.cos(2 * k) / (1 + k * k), 0, np.inf, tol=1e-10)
    assert abs(val - math.pi / 2 * math.exp(-2)) < 1e-7


def test_richardson_removes_h2():
    f = lambda h: 3.0 + 0.7 * h * h + 0.1 * h**4
    assert abs(richardson([f(0.1), f(0.05), f(0.025)], 2.0, (2, 4)) - 3.0) < 1e-14
