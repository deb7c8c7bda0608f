"""Shared numerical kernels.

Complex complementary error function (plain and scaled), a bracketed
root finder, and adaptive quadrature for complex integrands on finite and
semi-infinite domains.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import integrate as _integrate
from scipy import special as _special

__all__ = [
    "Bracket",
    "RootFindingError",
    "IntegrationError",
    "erfc_complex",
    "erfcx_complex",
    "exp_neg_square",
    "solve_root",
    "integrate",
    "integrate_fourier",
    "damped_integral",
    "richardson",
]


# ---------------------------------------------------------------------------
# complementary error function
# ---------------------------------------------------------------------------

_SPLIT = 134217729.0  # 2**27 + 1


def _two_prod(a, b):
    """Error-free product: a*b == p + e exactly (Dekker)."""
    p = a * b
    ah = a * _SPLIT
    ah = ah - (ah - a)
    al = a - ah
    bh = b * _SPLIT
    bh = bh - (bh - b)
    bl = b - bh
    e = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, e


def _exp_square(z, sign):
    """exp(sign * z**2) with z**2 formed in double-double precision.

    The imaginary part of z**2 can reach ~1800 on |z| <= 30; rounding it
    naively costs ~1e-13 relative accuracy in the phase.
    """
    x = np.real(z)
    y = np.imag(z)
    xx, xx_e = _two_prod(x, x)
    yy, yy_e = _two_prod(y, y)
    xy, xy_e = _two_prod(x, y)
    re_hi = xx - yy
    # error of the subtraction itself (two-sum)
    bb = re_hi - xx
    re_lo = ((xx - (re_hi - bb)) + (-yy - bb)) + (xx_e - yy_e)
    im_hi = 2.0 * xy
    im_lo = 2.0 * xy_e
    re_hi, re_lo, im_hi, im_lo = (sign * re_hi, sign * re_lo,
                                  sign * im_hi, sign * im_lo)
    with np.errstate(over="ignore", under="ignore", invalid="ignore"):
        mag = np.exp(re_hi) * (1.0 + re_lo)
        phase = (np.cos(im_hi) + 1j * np.sin(im_hi)) * (1.0 + 1j * im_lo)
        return mag * phase


def exp_neg_square(z):
    """exp(-z**2) for complex z, accurate in the phase for large |z|."""
    z = np.asarray(z, dtype=complex)
    out = _exp_square(z, -1.0)
    return out[()] if out.ndim == 0 else out


def erfcx_complex(z):
    """Scaled complementary error function exp(z**2) * erfc(z).

    Bounded in the sector |arg z| < 3*pi/4; in the remaining sector it
    grows like 2*exp(z**2), which is returned as the analytic continuation.
    """
    z = np.asarray(z, dtype=complex)
    right = np.real(z) >= 0
    out = np.empty_like(z)
    out[right] = _special.erfcx(z[right])
    zl = z[~right]
    if zl.size:
        out[~right] = 2.0 * _exp_square(zl, 1.0) - _special.erfcx(-zl)
    return out[()] if out.ndim == 0 else out


def erfc_complex(z, *, scaled: bool = False):
    """Complementary error function of a complex argument.

    Region split: for Re z >= 0 the value is exp(-z**2) times the scaled
    Faddeeva-type function (bounded there); for Re z < 0 the reflection
    erfc(z) = 2 - erfc(-z) is used, which is exactly the "+2" sector rule
    of the large-|z| asymptotic series.

    Parameters
    ----------
    z : complex or array of complex
    scaled : bool
        Return exp(z**2) * erfc(z) instead.

    Raises
    ------
    OverflowError
        If the unscaled value is not representable in double precision.
    """
    if scaled:
        return erfcx_complex(z)
    z = np.asarray(z, dtype=complex)
    right = np.real(z) >= 0
    out = np.empty_like(z)
    zr = z[right]
    zl = -z[~right]
    with np.errstate(over="ignore", invalid="ignore"):
        out[right] = _exp_square(zr, -1.0) * _special.erfcx(zr)
        if zl.size:
            out[~right] = 2.0 - _exp_square(zl, -1.0) * _special.erfcx(zl)
    if not np.all(np.isfinite(out)):
        raise OverflowError(
            "erfc overflows for some arguments; request scaled=True")
    return out[()] if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# root finding
# ---------------------------------------------------------------------------

class RootFindingError(RuntimeError):
    """Bracket without sign change, or no convergence within the cap."""


@dataclass(frozen=True)
class Bracket:
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"empty bracket [{self.lo}, {self.hi}]")

    @property
    def width(self) -> float:
        return self.hi - self.lo


def solve_root(f: Callable[[float], float], bracket: Bracket | tuple,
               tol: float = 1e-14, maxiter: int = 200) -> float:
    """Root of a continuous real function inside a sign-changing bracket.

    Bisection safeguarded secant steps (Illinois variant of regula falsi
    with a bisection fallback), so every iterate stays inside the current
    bracket. Terminates when the bracket is narrower than
    ``tol * max(1, |x|)`` or f vanishes exactly.
    """
    if not isinstance(bracket, Bracket):
        bracket = Bracket(*bracket)
    a, b = float(bracket.lo), float(bracket.hi)
    fa, fb = f(a), f(b)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if not (np.isfinite(fa) and np.isfinite(fb)):
        raise RootFindingError(f"non-finite f at bracket ends: {fa}, {fb}")
    if (fa > 0) == (fb > 0):
        raise RootFindingError(
            f"no sign change on [{a}, {b}]: f = {fa:.3e}, {fb:.3e}")
    side = 0
    for _ in range(maxiter):
        width = b - a
        mid = 0.5 * (a + b)
        # second test: a and b are adjacent doubles
        if width <= tol * max(1.0, abs(a), abs(b)) or not a < mid < b:
            return mid
        # secant step, rejected if it lands too close to an end
        x = (a * fb - b * fa) / (fb - fa)
        if not (a + 0.01 * width < x < b - 0.01 * width):
            x = 0.5 * (a + b)
        fx = f(x)
        if fx == 0.0:
            return x
        if (fx > 0) == (fa > 0):
            a, fa = x, fx
            if side == -1:
                fb *= 0.5
            side = -1
        else:
            b, fb = x, fx
            if side == 1:
                fa *= 0.5
            side = 1
        # a bisection every step keeps the worst case linear
        m = 0.5 * (a + b)
        fm = f(m)
        if fm == 0.0:
            return m
        if (fm > 0) == (fa > 0):
            a, fa = m, fm
        else:
            b, fb = m, fm
    raise RootFindingError(f"no convergence after {maxiter} iterations; "
                           f"bracket [{a}, {b}]")


# ---------------------------------------------------------------------------
# quadrature
# ---------------------------------------------------------------------------

class IntegrationError(RuntimeError):
    """Adaptive quadrature missed its tolerance; carries the best estimate."""

    def __init__(self, message, estimate, error):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


def _pieces(a, b, points):
    knots = sorted(p for p in (points or ()) if a < p < b)
    edges = [a, *knots, b]
    return list(zip(edges[:-1], edges[1:]))


def integrate(f: Callable[[float], complex], a: float, b: float, *,
              points: Sequence[float] | None = None, tol: float = 1e-12,
              limit: int = 400, full_output: bool = False):
    """Adaptive Gauss-Kronrod quadrature of a complex-valued integrand.

    ``a`` and ``b`` may be infinite (the integrand must decay). Kinks and
    other breakpoints are passed in ``points`` and split the domain.
    Returns the estimate, or ``(estimate, error)`` with ``full_output``.
    Raises IntegrationError with the best estimate attached when the
    error estimate exceeds ``tol`` (absolute).
    """
    total = 0j
    err = 0.0
    for lo, hi in _pieces(a, b, points):
        re, e_re = _integrate.quad(lambda x: np.real(f(x)), lo, hi,
                                   epsabs=tol / 4, epsrel=0, limit=limit)
        im, e_im = _integrate.quad(lambda x: np.imag(f(x)), lo, hi,
                                   epsabs=tol / 4, epsrel=0, limit=limit)
        total += re + 1j * im
        err += e_re + e_im
    if not err <= tol:
        raise IntegrationError(
            f"quadrature error estimate {err:.2e} exceeds tol {tol:.2e}",
            total, err)
    return (total, err) if full_output else total


def integrate_fourier(f: Callable[[float], complex], omega: float,
                      kind: str = "cos", *, tol: float = 1e-12,
                      full_output: bool = False):
    """Integral of f(k) * cos(omega k) (or sin) over k in [0, inf).

    Uses the QAWF extrapolation scheme, which handles slowly decaying
    amplitudes (e.g. 1/k**2) without artificial damping.
    """
    if omega == 0.0:
        if kind == "sin":
            return (0j, 0.0) if full_output else 0j
        return integrate(lambda k: f(k), 0.0, np.inf, tol=tol,
                         full_output=full_output)
    total = 0j
    err = 0.0
    sgn = 1.0
    if omega < 0:
        omega = -omega
        sgn = -1.0 if kind == "sin" else 1.0
    for part in (np.real, np.imag):
        val, e = _integrate.quad(lambda k: part(f(k)), 0.0, np.inf,
                                 weight=kind, wvar=omega, epsabs=tol / 2,
                                 limlst=200, limit=400)
        total += val if part is np.real else 1j * val
        err += e
    total *= sgn
    if not err <= tol:
        raise IntegrationError(
            f"Fourier quadrature error {err:.2e} exceeds tol {tol:.2e}",
            total, err)
    return (total, err) if full_output else total


def richardson(values: Sequence[complex], ratio: float = 2.0,
               orders: Sequence[int] = (1, 2)):
    """Richardson extrapolation of a sequence computed at step s, s/r, s/r**2...

    ``orders`` lists the powers of the step removed successively.
    """
    table = [complex(v) for v in values]
    for p in orders[: len(table) - 1]:
        fac = ratio ** p
        table = [(fac * table[i + 1] - table[i]) / (fac - 1)
                 for i in range(len(table) - 1)]
    return table[-1]


def damped_integral(f: Callable[[float], complex], a: float, b: float, *,
                    eps: Sequence[float] = (1e-2, 5e-3, 2.5e-3),
                    points: Sequence[float] | None = None,
                    tol: float = 1e-12):
    """Regularised integral of an oscillatory, slowly decaying integrand.

    Computes I(eps) = int f(k) exp(-eps k**2) dk for each eps and
    extrapolates eps -> 0 assuming I(eps) = I0 + a eps + b eps**2 + ...
    Only valid when that expansion holds, i.e. the quantity being
    regularised is smooth on the scale sqrt(eps).
    """
    vals = [integrate(lambda k, e=e: f(k) * math.exp(-e * k * k), a, b,
                      points=points, tol=tol) for e in eps]
    ratios = [eps[i] / eps[i + 1] for i in range(len(eps) - 1)]
    if not np.allclose(ratios, ratios[0]):
        raise ValueError("eps must form a geometric sequence")
    return richardson(vals, ratio=ratios[0], orders=(1, 2, 3, 4))
