"""One source at the origin of the real line, 0-1 particle sectors.

Units hbar = 2m = 1. The Hamiltonian acts as -phi1'' in the one-particle
sector and as conj(c) * phi1(0) in the vacuum sector, with the interior
boundary condition  phi0 = [phi1'(0+) - phi1'(0-)] / c.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .numerics import Bracket, erfcx_complex, solve_root

SQRT_2PI = math.sqrt(2 * math.pi)
# cube roots of unity; kappa_j = kappa * OMEGA[j]
OMEGA = np.exp(2j * np.pi * np.arange(3) / 3)
# principal sqrt(i) used for sqrt(i t) = e^{i pi/4} sqrt(t)
SQRT_I = cmath.exp(0.25j * math.pi)


class ZeroCouplingError(ValueError):
    """The c -> 0 limit (free vacuum) has no representation here."""


@dataclass(frozen=True)
class Coupling:
    """Complex coupling constant c = sqrt(2 kappa^3) e^{i phi_c}."""

    c: complex

    def __post_init__(self):
        object.__setattr__(self, "c", complex(self.c))
        if not (math.isfinite(self.c.real) and math.isfinite(self.c.imag)):
            raise ValueError(f"non-finite coupling {self.c}")

    @classmethod
    def from_kappa(cls, kappa: float, phase: float = 0.0) -> "Coupling":
        return cls(math.sqrt(2 * kappa**3) * cmath.exp(1j * phase))

    @property
    def abs2(self) -> float:
        return abs(self.c) ** 2

    @property
    def kappa(self) -> float:
        return (self.abs2 / 2) ** (1 / 3)

    @property
    def phase(self) -> float:
        return cmath.phase(self.c)

    # alias matching the usual symbol
    phi_c = phase

    def require_nonzero(self):
        if self.c == 0:
            raise ZeroCouplingError(
                "c = 0 is the free vacuum limit; no normalisable IBC ground "
                "state is defined there")


def _as_coupling(c) -> Coupling:
    return c if isinstance(c, Coupling) else Coupling(c)


@dataclass(frozen=True)
class SectorState01:
    """A vector of the truncated Fock space C + L^2(R).

    ``phi1`` is a closed-form evaluator x -> amplitude (vectorised over
    numpy arrays).
    """

    phi0: complex
    phi1: Callable

    def __call__(self, x):
        return self.phi1(x)

    def __add__(self, other: "SectorState01") -> "SectorState01":
        f, g = self.phi1, other.phi1
        return SectorState01(self.phi0 + other.phi0, lambda x: f(x) + g(x))

    def scale(self, a: complex) -> "SectorState01":
        f = self.phi1
        return SectorState01(a * self.phi0, lambda x: a * f(x))


@dataclass(frozen=True)
class GroundState:
    coupling: Coupling
    phi0: complex
    amplitude_A: float
    kappa: float
    energy: float
    mass: float = 0.0

    def phi1(self, x):
        return self.amplitude_A * np.exp(-self.kappa * np.abs(x))

    @property
    def weights(self) -> tuple[float, float]:
        """(|phi0|^2, ||phi1||^2), both in closed form."""
        return abs(self.phi0) ** 2, self.amplitude_A**2 / self.kappa

    def as_state(self) -> SectorState01:
        return SectorState01(self.phi0, self.phi1)


@dataclass(frozen=True)
class ScatteringState:
    """Flux-normalised generalised eigenfunction with energy k^2."""

    coupling: Coupling
    k: float
    b_k: complex
    phi0: complex
    energy: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "energy", self.k**2)

    def phi1(self, x):
        k = self.k
        return (np.exp(1j * k * x)
                + self.b_k * np.exp(1j * abs(k) * np.abs(x))) / SQRT_2PI

    @property
    def r_k(self) -> complex:
        return self.b_k

    @property
    def t_k(self) -> complex:
        return 1 + self.b_k

    def as_state(self) -> SectorState01:
        return SectorState01(self.phi0, self.phi1)


@dataclass(frozen=True)
class SectorGreen:
    g11: complex
    g10: complex
    g01: complex
    g00: complex
    energy: complex
    x: float
    y: float


@dataclass(frozen=True)
class SectorKernel:
    k11: complex
    k10: complex
    k01: complex
    k00: complex
    t: float
    x: float
    y: float


# ---------------------------------------------------------------------------
# spectral data
# ---------------------------------------------------------------------------

def ground_state(c) -> GroundState:
    """Normalised negative-energy eigenstate, E = -kappa^2."""
    c = _as_coupling(c)
    c.require_nonzero()
    kappa = c.kappa
    phi0 = -math.sqrt(2 / 3) * abs(c.c) / c.c
    return GroundState(c, phi0, math.sqrt(kappa / 3), kappa, -kappa**2)


def ground_state_massive(c, M: float) -> GroundState:
    """Ground state with a rest mass M added in the one-particle sector.

    kappa > sqrt(M) solves 2 kappa (kappa^2 - M) = |c|^2; the energy is
    M - kappa^2.
    """
    c = _as_coupling(c)
    c.require_nonzero()
    if not M > 0:
        raise ValueError("mass M must be positive")
    s = math.sqrt(M)
    a2 = c.abs2

    def f(kappa):
        # kappa^2 - M factored to keep the |c| -> 0 regime accurate
        return 2 * kappa * (kappa - s) * (kappa + s) - a2

    hi = s + (a2 / 2) ** (1 / 3)
    kappa = solve_root(f, Bracket(s, hi * (1 + 1e-12) + 1e-300), tol=1e-16)
    # kappa^2 - M from the secular equation itself (no cancellation)
    gap = a2 / (2 * kappa)
    denom = 2 * kappa**2 + gap  # 3 kappa^2 - M
    A = math.sqrt(kappa * gap / denom)
    # IBC: phi0 = -2 A kappa / c
    phi0 = -2 * A * kappa / c.c
    return GroundState(c, phi0, A, kappa, -gap, mass=M)


def reflection_amplitude(c, k):
    """b_k = -i kappa^3 / (k^3 + i kappa^3), analytic in k.

    For real k the caller passes |k|; for E < 0 pass k = i sqrt(-E).
    """
    k3 = _as_coupling(c).kappa ** 3
    return -1j * k3 / (k**3 + 1j * k3)


def scattering_state(c, k: float) -> ScatteringState:
    c = _as_coupling(c)
    if k == 0:
        raise ValueError("scattering states are defined for k != 0")
    ak = abs(k)
    if c.c == 0:
        return ScatteringState(c, k, 0j, 0j)
    b = reflection_amplitude(c, ak)
    phi0 = 2j * ak * b / (SQRT_2PI * c.c)
    return ScatteringState(c, k, b, phi0)


def diffraction_coefficient(c, k) -> complex:
    """D = 2 i k b_k (annihilation followed by re-creation at the source)."""
    if isinstance(k, (int, float)) and not k > 0:
        raise ValueError("diffraction coefficient needs k > 0")
    return 2j * k * reflection_amplitude(c, k)


def energy_to_k(E: complex) -> complex:
    """Retarded branch: k = sqrt(E) > 0 for E > 0, k = i sqrt(-E) for E < 0.

    Complex E maps to the root with Im k >= 0.
    """
    E = complex(E)
    if E == 0:
        raise ValueError("E = 0 is excluded")
    if E.imag == 0:
        return complex(math.sqrt(E.real)) if E.real > 0 else 1j * math.sqrt(-E.real)
    k = cmath.sqrt(E)
    return k if k.imag >= 0 else -k


def free_green(x, y, k):
    """G_0(x, y, E) = exp(i k |x - y|) / (2 i k)."""
    return np.exp(1j * k * np.abs(np.subtract(x, y))) / (2j * k)


def green_line(c, E, x: float, y: float) -> SectorGreen:
    """Sector-resolved resolvent kernel (E - H)^{-1} of the one-source model."""
    c = _as_coupling(c)
    c.require_nonzero()
    k = energy_to_k(E)
    b = reflection_amplitude(c, k)
    ex, ey = cmath.exp(1j * k * abs(x)), cmath.exp(1j * k * abs(y))
    g11 = (cmath.exp(1j * k * abs(x - y)) + b * ex * ey) / (2j * k)
    g01 = b / c.c * ey
    g10 = b / c.c.conjugate() * ex
    g00 = 2j * k * b / c.abs2
    return SectorGreen(g11, g10, g01, g00, complex(E), x, y)


# ---------------------------------------------------------------------------
# time evolution
# ---------------------------------------------------------------------------

def free_kernel(x, y, t):
    """K_0(x, y, t) = exp(-(x-y)^2 / (4 i t)) / sqrt(4 pi i t)."""
    d = np.subtract(x, y)
    return np.exp(1j * d * d / (4 * t)) / (2 * math.sqrt(math.pi * t) * SQRT_I)


def _erfc_terms(s, t, kappa):
    """Sum over j of w_j(s) = exp(i kappa_j^2 t - kappa_j s) erfc(z_j),

    z_j = s / (2 sqrt(it)) - kappa_j sqrt(it), returned per j as an array
    (..., 3). Evaluated as exp(i s^2 / 4t) * erfcx(z_j), which never
    overflows: kappa_1, kappa_2 have negative real part.
    """
    s = np.asarray(s, dtype=float)[..., None]
    a = SQRT_I * math.sqrt(t)
    kj = kappa * OMEGA
    z = s / (2 * a) - kj * a
    return np.exp(1j * s * s / (4 * t)) * erfcx_complex(z), kj


def k11(c, x, y, t):
    c = _as_coupling(c)
    s = np.abs(x) + np.abs(y)
    w, kj = _erfc_terms(s, t, c.kappa)
    return free_kernel(x, y, t) + np.sum(kj / 6 * w, axis=-1)


def k10(c, x, t):
    c = _as_coupling(c)
    w, kj = _erfc_terms(np.abs(x), t, c.kappa)
    return -np.sum(kj**2 * w, axis=-1) / (3 * c.c.conjugate())


def k01(c, y, t):
    c = _as_coupling(c)
    w, kj = _erfc_terms(np.abs(y), t, c.kappa)
    return -np.sum(kj**2 * w, axis=-1) / (3 * c.c)


def k00(c, t):
    c = _as_coupling(c)
    w, _ = _erfc_terms(0.0, t, c.kappa)
    return complex(np.sum(w) / 3)


def propagator(c, t: float, x: float, y: float) -> SectorKernel:
    """Exact kernel of exp(-i H t) in all four sector combinations."""
    c = _as_coupling(c)
    c.require_nonzero()
    if not t > 0:
        raise ValueError("propagator needs t > 0")
    return SectorKernel(complex(k11(c, x, y, t)), complex(k10(c, x, t)),
                        complex(k01(c, y, t)), k00(c, t), t, x, y)


def propagator_short_time(c, t: float, x: float, y: float) -> SectorKernel:
    """Leading small-t behaviour of the kernel (diffractive path |x|+|y|).

    The 10/01 prefactor 4 c t^2 / x^2 follows from the erfc asymptotics
    with the cube-root-of-unity sum; the exact kernel converges to it.
    """
    c = _as_coupling(c)
    s = abs(x) + abs(y)
    root = 2 * math.sqrt(math.pi * t) * SQRT_I  # sqrt(4 pi i t)
    diff11 = (-4j * c.abs2 * t**3 / s**3
              * cmath.exp(1j * s * s / (4 * t)) / root)
    g10 = 4 * c.c * t**2 / x**2 * cmath.exp(1j * x * x / (4 * t)) / root
    g01 = (4 * c.c.conjugate() * t**2 / y**2
           * cmath.exp(1j * y * y / (4 * t)) / root)
    return SectorKernel(complex(free_kernel(x, y, t)) + diff11, g10, g01,
                        1.0 + 0j, t, x, y)


# ---------------------------------------------------------------------------
# probability flow
# ---------------------------------------------------------------------------

def _one_sided_derivative(f, x0, h, side):
    # fourth-order one-sided difference
    s = side * h
    v = [f(x0 + side * 1e-300 if i == 0 else x0 + i * s) for i in range(5)]
    return (-25 * v[0] + 48 * v[1] - 36 * v[2] + 16 * v[3] - 3 * v[4]) / (12 * s)


def flux_balance(state: SectorState01, c, h: float = 1e-4) -> tuple[float, float]:
    """Probability flow from the one-particle sector into the vacuum.

    Returns (-[j1]_{0-}^{0+}, d|phi0|^2/dt). The first entry uses only
    one-sided derivatives of phi1 at the source, the second only the
    vacuum-sector Schroedinger equation i dphi0/dt = conj(c) phi1(0).
    """
    c = _as_coupling(c)
    f = state.phi1
    v0 = complex(f(0.0))
    jump = (_one_sided_derivative(f, 0.0, h, +1)
            - _one_sided_derivative(f, 0.0, h, -1))
    current_jump = -2 * (v0.conjugate() * jump).imag
    dphi0 = -1j * c.c.conjugate() * v0
    drate = 2 * (state.phi0.conjugate() * dphi0).real
    return current_jump, drate


def evolve_eigen_superposition(states, amplitudes, t) -> SectorState01:
    """sum_n a_n e^{-i E_n t} phi_n for eigenstates with known energies."""
    out = None
    for s, a in zip(states, amplitudes):
        term = s.as_state().scale(a * cmath.exp(-1j * s.energy * t))
        out = term if out is None else out + term
    return out
