"""A source at x = 0 inside the Dirichlet box [-l1, l2].

Spectrum, sector Green function, spectral determinant, the exact
staircase and its expansion into periodic and diffractive orbits.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .numerics import Bracket, solve_root
from .single_source import Coupling, SectorGreen, energy_to_k, reflection_amplitude


@dataclass(frozen=True)
class BoxSpec:
    l1: float
    l2: float
    coupling: Coupling = Coupling(1.0)
    l: float = field(init=False)

    def __post_init__(self):
        if not (self.l1 > 0 and self.l2 > 0):
            raise ValueError(f"need l1, l2 > 0, got {self.l1}, {self.l2}")
        if not isinstance(self.coupling, Coupling):
            object.__setattr__(self, "coupling", Coupling(self.coupling))
        object.__setattr__(self, "l1", float(self.l1))
        object.__setattr__(self, "l2", float(self.l2))
        object.__setattr__(self, "l", self.l1 + self.l2)

    @property
    def c2(self) -> float:
        return self.coupling.abs2


@dataclass(frozen=True)
class BoxSpectrum:
    ground_energy: float
    positive_levels: tuple


@dataclass(frozen=True)
class OrbitTerm:
    n0: int
    n1: int
    n2: int
    length_L: float
    multinomial: int

    @property
    def n(self) -> int:
        return self.n0 + self.n1 + self.n2


# ---------------------------------------------------------------------------
# bound state
# ---------------------------------------------------------------------------

def _sinh_ratio(kappa, l1, l2):
    """sinh(kappa l1) sinh(kappa l2) / sinh(kappa l) without overflow."""
    l = l1 + l2
    return (-math.expm1(-2 * kappa * l1)) * (-math.expm1(-2 * kappa * l2)) / (
        -2 * math.expm1(-2 * kappa * l))


def ground_secular(spec: BoxSpec, kappa: float) -> float:
    return kappa**3 - spec.c2 * _sinh_ratio(kappa, spec.l1, spec.l2)


def box_ground_energy(spec: BoxSpec) -> float:
    """E = -kappa^2 with kappa^3 = |c|^2 sinh(kl1) sinh(kl2) / sinh(kl)."""
    spec.coupling.require_nonzero()
    kappa = box_ground_kappa(spec)
    return -kappa**2


def box_ground_kappa(spec: BoxSpec) -> float:
    # the ratio is below 1/2, so kappa < (|c|^2/2)^(1/3)
    hi = 1.01 * spec.coupling.kappa
    lo = 0.5 * hi
    while ground_secular(spec, lo) >= 0:
        lo *= 0.5
        if lo < 1e-300:
            raise ArithmeticError("could not bracket the box ground state")
    return solve_root(lambda k: ground_secular(spec, k), Bracket(lo, hi),
                      tol=1e-15)


def small_box_energy(spec: BoxSpec) -> float:
    """Small-box approximation -|c|^2 l1 l2 / l."""
    return -spec.c2 * spec.l1 * spec.l2 / spec.l


def large_box_energy(spec: BoxSpec) -> float:
    return -spec.coupling.kappa ** 2


# ---------------------------------------------------------------------------
# positive levels
# ---------------------------------------------------------------------------

def positive_secular(spec: BoxSpec, k):
    """Pole-free form k^3 sin(kl) + |c|^2 sin(kl1) sin(kl2)."""
    return k**3 * np.sin(k * spec.l) + spec.c2 * np.sin(k * spec.l1) * np.sin(k * spec.l2)


def _m_of_k(spec: BoxSpec, k):
    """E - |c|^2 G_b(0,0,E) at E = k^2 > 0 (increasing between active poles)."""
    return k * k + spec.c2 * math.sin(k * spec.l1) * math.sin(k * spec.l2) / (
        k * math.sin(k * spec.l))


def _is_inactive(spec: BoxSpec, n: int) -> bool:
    # bare level n has a node at the source
    t = n * spec.l1 / spec.l
    return abs(t - round(t)) < 1e-12


def _pole_k(spec: BoxSpec, n: int) -> float:
    return n * math.pi / spec.l


def box_positive_levels(spec: BoxSpec, E_max: float) -> list:
    """All eigenvalues 0 < E <= E_max, sorted.

    Between consecutive bare levels (n pi / l)^2 that do not vanish at the
    source, E - |c|^2 G_b(0,0,E) rises monotonically from -inf to +inf,
    so there is exactly one level; there is none below the first such
    pole. Bare levels with a node at the source are levels themselves.
    """
    if not E_max > 0:
        raise ValueError("E_max must be positive")
    k_max = math.sqrt(E_max)
    n_max = int(k_max * spec.l / math.pi) + 2
    levels = []
    active = []
    for n in range(1, n_max + 2):
        if _is_inactive(spec, n):
            levels.append(_pole_k(spec, n) ** 2)
        else:
            active.append(n)
    big = 1e300
    for n_lo, n_hi in zip(active, active[1:]):
        a, b = _pole_k(spec, n_lo), _pole_k(spec, n_hi)
        if a > k_max:
            break

        def g(k, a=a, b=b):
            if k <= a:
                return -big
            if k >= b:
                return big
            return _m_of_k(spec, k)

        k = solve_root(g, Bracket(a, b), tol=1e-15)
        levels.append(k * k)
    return sorted(E for E in levels if E <= E_max)


def box_spectrum(spec: BoxSpec, E_max: float) -> BoxSpectrum:
    return BoxSpectrum(box_ground_energy(spec), tuple(box_positive_levels(spec, E_max)))


def scan_positive_levels(spec: BoxSpec, E_max: float, refine: int = 1) -> list:
    """Independent level finder: sign changes of the pole-free secular
    function on a uniform k grid, refined by bisection.

    Misses levels closer together than the grid step and double roots;
    used as a cross-check only.
    """
    step = min(math.pi / (4 * spec.l), spec.coupling.kappa / 10) / refine
    k_max = math.sqrt(E_max)
    ks = np.arange(step, k_max + step, step)
    f = positive_secular(spec, ks)
    out = []
    for i in range(len(ks) - 1):
        if f[i] == 0:
            out.append(ks[i])
        elif f[i] * f[i + 1] < 0:
            out.append(solve_root(lambda k: float(positive_secular(spec, k)),
                                  Bracket(ks[i], ks[i + 1]), tol=1e-15))
    return [k * k for k in out if k * k <= E_max]


# ---------------------------------------------------------------------------
# Green functions and spectral determinant
# ---------------------------------------------------------------------------

def bare_green(spec: BoxSpec, E, x, y):
    """Dirichlet Green function G_b(x, y, E) of the box without source.

    Written with exponentials e^{2ikA}, which stay bounded for Im k >= 0.
    """
    k = energy_to_k(E)
    lo, hi = min(x, y), max(x, y)
    A = lo + spec.l1
    B = spec.l2 - hi
    e = np.exp
    return (-0.5j / k * e(1j * k * (hi - lo)) * (1 - e(2j * k * A))
            * (1 - e(2j * k * B)) / (1 - e(2j * k * spec.l)))


def bare_green_00(spec: BoxSpec, E):
    return bare_green(spec, E, 0.0, 0.0)


def m_function(spec: BoxSpec, E):
    """E - |c|^2 G_b(0,0,E), whose zeros are the levels."""
    return E - spec.c2 * bare_green_00(spec, E)


def box_green(spec: BoxSpec, E, x: float, y: float) -> SectorGreen:
    spec.coupling.require_nonzero()
    c = spec.coupling.c
    m = m_function(spec, E)
    if abs(m) < 1e-10 * max(1.0, abs(E)):
        warnings.warn(f"E={E} is within round-off of an eigenvalue",
                      RuntimeWarning, stacklevel=2)
    g00 = 1 / m
    gx0 = bare_green(spec, E, x, 0.0)
    g0y = bare_green(spec, E, 0.0, y)
    g11 = bare_green(spec, E, x, y) + gx0 * spec.c2 * g00 * g0y
    return SectorGreen(complex(g11), complex(c * gx0 * g00),
                       complex(c.conjugate() * g00 * g0y), complex(g00),
                       complex(E), x, y)


def mirror_sum_green(spec: BoxSpec, E, x, y, n_max: int = 200):
    """Image sum over n in [-n_max, n_max] of free Green functions."""
    k = energy_to_k(E)
    n = np.arange(-n_max, n_max + 1)
    l = spec.l
    direct = np.exp(1j * k * np.abs(x - y - 2 * n * l))
    mirror = np.exp(1j * k * np.abs(x + y + 2 * spec.l1 - 2 * n * l))
    return complex(np.sum(direct - mirror) / (2j * k))


def trace_bare_green(spec: BoxSpec, E):
    k = energy_to_k(E)
    return spec.l / np.tan(k * spec.l) / (2 * k) - 1 / (2 * k * k)


def _sinc(u):
    """sin(u)/u for real u, sinh(|u|)/|u| for imaginary u = i|u|."""
    if isinstance(u, complex):
        v = abs(u.imag)
        return 1.0 if v == 0 else math.sinh(v) / v
    return 1.0 if u == 0 else math.sin(u) / u


def spectral_determinant(spec: BoxSpec, E: float) -> float:
    """Entire form E l sinc(kl) / (|c|^2 l1 l2) + sinc(kl1) sinc(kl2).

    Equal to the bare determinant sin(kl)/(kl) times
    (E - |c|^2 G_b(0,0,E)) l / (|c|^2 l1 l2), with the poles removed;
    Delta(0) = 1.
    """
    E = float(E)
    k = math.sqrt(E) if E >= 0 else 1j * math.sqrt(-E)
    return (E * spec.l * _sinc(k * spec.l) / (spec.c2 * spec.l1 * spec.l2)
            + _sinc(k * spec.l1) * _sinc(k * spec.l2))


def bare_determinant(spec: BoxSpec, E: float) -> float:
    k = math.sqrt(E) if E >= 0 else 1j * math.sqrt(-E)
    return _sinc(k * spec.l)


# ---------------------------------------------------------------------------
# staircase
# ---------------------------------------------------------------------------

def staircase_exact(spec: BoxSpec, E: float, include_bound_state: bool = False,
                    tol: float = 1e-12) -> int:
    """Number of positive levels <= E, counted without locating them.

    Uses the interlacing of levels with the bare poles: below E there
    are (#active poles - 1) levels in completed intervals, one more if
    E - |c|^2 G_b(0,0,E) >= 0, plus the bare levels with a node at the
    source. ``include_bound_state`` adds the negative level.
    """
    if not E > 0:
        raise ValueError("staircase_exact needs E > 0")
    k = math.sqrt(E)
    n_top = int(k * spec.l / math.pi)
    if abs(k * spec.l / math.pi - round(k * spec.l / math.pi)) < tol:
        raise ValueError(f"E={E} coincides with a bare box level")
    active = sum(1 for n in range(1, n_top + 1) if not _is_inactive(spec, n))
    inactive = n_top - active
    m = _m_of_k(spec, k)
    if abs(m) < tol * max(1.0, E):
        raise ValueError(f"E={E} is within round-off of an eigenvalue")
    count = inactive + (active - 1 + (m > 0) if active else 0)
    return count + (1 if include_bound_state else 0)


def bare_staircase_trace(spec: BoxSpec, E: float, terms: int = 10_000) -> float:
    """Weyl terms plus the periodic orbit sum of the bare box."""
    kl = math.sqrt(E) * spec.l
    n = np.arange(1, terms + 1)
    return kl / math.pi - 0.5 + float(np.sum(np.sin(2 * n * kl) / (math.pi * n)))


@lru_cache(maxsize=32)
def _orbits_cached(l1: float, l2: float, count: int):
    l = l1 + l2
    L_max = min(l1, l2)
    while True:
        found = []
        for n0 in range(int(L_max / l) + 1):
            r0 = L_max - n0 * l
            for n1 in range(int(r0 / l1 + 1e-12) + 1):
                r1 = r0 - n1 * l1
                for n2 in range(int(r1 / l2 + 1e-12) + 1):
                    if n0 == n1 == n2 == 0:
                        continue
                    found.append((n0 * l + n1 * l1 + n2 * l2, n0, n1, n2))
        if len(found) >= count:
            break
        L_max *= 1.5
    # lexicographic tie-break; round L so float noise does not split ties
    found.sort(key=lambda t: (round(t[0], 10), t[1], t[2], t[3]))
    out = []
    for L, n0, n1, n2 in found[:count]:
        n = n0 + n1 + n2
        mult = math.factorial(n) // (math.factorial(n0) * math.factorial(n1)
                                     * math.factorial(n2))
        out.append(OrbitTerm(n0, n1, n2, L, mult))
    return tuple(out)


def enumerate_orbits(spec: BoxSpec, count: int) -> list:
    """The ``count`` shortest (n0, n1, n2) != 0 by L = n0 l + n1 l1 + n2 l2.

    Ties in L are broken lexicographically on (n0, n1, n2).
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    return list(_orbits_cached(spec.l1, spec.l2, int(count)))


def staircase_mean(spec: BoxSpec, E: float) -> float:
    k = math.sqrt(E)
    return k * spec.l / math.pi + math.atan(k**3 / spec.coupling.kappa**3) / math.pi


def orbit_count_up_to(spec: BoxSpec, L_max: float) -> int:
    """Number of orbits with L <= L_max (a count that never splits a tie)."""
    count = 64
    while True:
        orbits = enumerate_orbits(spec, count)
        if orbits[-1].length_L > L_max + 1e-9:
            return sum(1 for o in orbits if o.length_L <= L_max + 1e-9)
        count *= 2


def _orbit_arrays(orbits):
    n0 = np.array([o.n0 for o in orbits])
    m = np.array([o.n1 + o.n2 for o in orbits])
    L = np.array([o.length_L for o in orbits])
    return n0, m, L


def _log10_max_term(orbits, babs):
    n0, m, _ = _orbit_arrays(orbits)
    n = n0 + m
    logmult = np.array([math.log10(o.multinomial) for o in orbits])
    return float(np.max(logmult + m * np.log10(max(babs, 1e-300)) - np.log10(n)))


def _orbit_sum_mp(spec: BoxSpec, k: float, orbits, dps: int) -> float:
    import mpmath as mp

    with mp.workdps(dps):
        k = mp.mpf(k)
        k3 = mp.mpf(spec.coupling.kappa) ** 3
        theta = mp.atan(k**3 / k3)
        b = -1j * k3 / (k**3 + 1j * k3)
        u0 = mp.expj(2 * k * spec.l + 2 * theta)
        u1 = b * mp.expj(2 * k * spec.l1)
        u2 = b * mp.expj(2 * k * spec.l2)
        top = max(max(o.n0, o.n1, o.n2) for o in orbits)
        p0, p1, p2 = [mp.mpc(1)], [mp.mpc(1)], [mp.mpc(1)]
        for _ in range(top):
            p0.append(p0[-1] * u0)
            p1.append(p1[-1] * u1)
            p2.append(p2[-1] * u2)
        total = mp.mpc(0)
        for o in orbits:
            n = o.n
            term = o.multinomial * p0[o.n0] * p1[o.n1] * p2[o.n2] / n
            total += -term if n % 2 else term
        return float(mp.im(total) / mp.pi)


def staircase_trace_formula(spec: BoxSpec, E, orbit_count: int = 2855):
    """Mean staircase plus the sum over the shortest periodic and
    diffractive orbits. Vectorised over E.

    At E -> 0+ the mean term tends to 1/2 and the orbit sum to 1/2, so
    this counts the bound state as well as the positive levels.

    Individual orbit terms grow like multinomial * |b_k|^m while their sum
    stays O(1); when the largest term would cost more than ~1e-8 in double
    precision the sum is evaluated with mpmath instead.
    """
    E = np.atleast_1d(np.asarray(E, dtype=float))
    orbits = enumerate_orbits(spec, orbit_count) if orbit_count else []
    k = np.sqrt(E)
    theta = np.arctan(k**3 / spec.coupling.kappa**3)
    mean = k * spec.l / np.pi + theta / np.pi
    if not orbits:
        return mean if mean.size > 1 else float(mean[0])
    if enumerate_orbits(spec, orbit_count + 1)[-1].length_L - orbits[-1].length_L < 1e-9:
        # the large terms of one length only cancel against each other
        warnings.warn(f"orbit_count={orbit_count} splits the orbits of length "
                      f"{orbits[-1].length_L:g}; the truncated sum is unreliable, use "
                      f"orbit_count_up_to() for a complete set", RuntimeWarning, stacklevel=2)
    n0, m, L = _orbit_arrays(orbits)
    n = n0 + m
    weight = np.array([float(o.multinomial) for o in orbits]) * (-1.0) ** n / (np.pi * n)
    b = reflection_amplitude(spec.coupling, k)
    osc = np.empty_like(k)
    for i, (ki, bi, ti) in enumerate(zip(k, b, theta)):
        big = _log10_max_term(orbits, abs(bi))
        if big > 7:
            osc[i] = _orbit_sum_mp(spec, ki, orbits, dps=int(big) + 20)
        else:
            phase = np.exp(2j * ki * L + 2j * ti * n0)
            osc[i] = np.imag(phase * bi**m) @ weight
    out = mean + osc
    return out if out.size > 1 else float(out[0])
