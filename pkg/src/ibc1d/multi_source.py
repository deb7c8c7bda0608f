"""Several point sources on the line sharing one vacuum state."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .numerics import Bracket, solve_root
from .single_source import SQRT_2PI, Coupling


class NoBoundStateError(ValueError):
    """The secular equation has no positive root."""


class ResonanceError(ZeroDivisionError):
    pass


@dataclass(frozen=True)
class SourceArray:
    positions: tuple
    couplings: tuple

    def __post_init__(self):
        pos = tuple(float(x) for x in self.positions)
        cs = tuple(complex(c.c if isinstance(c, Coupling) else c)
                   for c in self.couplings)
        if len(pos) != len(cs) or not pos:
            raise ValueError("positions and couplings must be non-empty and "
                             "of equal length")
        if any(b <= a for a, b in zip(pos, pos[1:])):
            raise ValueError("positions must be strictly increasing")
        if all(c == 0 for c in cs):
            raise ValueError("at least one coupling must be non-zero")
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "couplings", cs)

    @classmethod
    def unsorted(cls, positions, couplings) -> "SourceArray":
        order = np.argsort(positions, kind="stable")
        return cls([positions[i] for i in order], [couplings[i] for i in order])

    @property
    def n(self) -> int:
        return len(self.positions)

    def _matrix(self):
        x = np.array(self.positions)
        c = np.array(self.couplings)
        return np.abs(x[:, None] - x[None, :]), np.conj(c)[:, None] * c[None, :]


@dataclass(frozen=True)
class MultiGroundState:
    kappa: float
    energy: float
    phi0: complex
    amplitudes: tuple
    positions: tuple

    def phi1(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape, dtype=complex)
        for a, xi in zip(self.amplitudes, self.positions):
            out = out + a * np.exp(-self.kappa * np.abs(x - xi))
        return out


@dataclass(frozen=True)
class MultiScatteringState:
    k: float
    phi0: complex
    b: tuple
    positions: tuple

    @property
    def energy(self) -> float:
        return self.k**2

    def phi1(self, x):
        x = np.asarray(x, dtype=float)
        ak = abs(self.k)
        out = np.exp(1j * self.k * x)
        for bi, xi in zip(self.b, self.positions):
            out = out + bi * np.exp(1j * ak * np.abs(x - xi))
        return out / SQRT_2PI

    @property
    def reflection(self) -> complex:
        return complex(sum(bi * np.exp(1j * self.k * xi)
                           for bi, xi in zip(self.b, self.positions)))

    @property
    def transmission(self) -> complex:
        return complex(1 + sum(bi * np.exp(-1j * self.k * xi)
                               for bi, xi in zip(self.b, self.positions)))


def secular_rhs(sources: SourceArray, kappa):
    """sum_{ij} conj(c_i) c_j exp(-kappa |x_i - x_j|), real by symmetry."""
    d, cc = sources._matrix()
    return float(np.real(np.sum(cc * np.exp(-kappa * d))))


def _kappa_roots(sources: SourceArray, n_scan: int = 4000):
    abs_sum = sum(abs(c) for c in sources.couplings)
    # 2 kappa^3 > (sum |c_i|)^2 >= rhs beyond this point
    hi = (abs_sum**2 / 2) ** (1 / 3) * (1 + 1e-9) + 1e-300

    def f(kappa):
        return 2 * kappa**3 - secular_rhs(sources, kappa)

    grid = np.geomspace(hi * 1e-9, hi, n_scan)
    d, cc = sources._matrix()
    vals = 2 * grid**3 - np.real(
        np.sum(cc[None] * np.exp(-grid[:, None, None] * d[None]), axis=(1, 2)))
    roots = []
    for i in range(n_scan - 1):
        if vals[i] < 0 <= vals[i + 1] or vals[i] > 0 >= vals[i + 1]:
            roots.append(solve_root(f, Bracket(grid[i], grid[i + 1])))
    return roots


def ground_state_multi(sources: SourceArray) -> MultiGroundState:
    """Bound state of lowest energy; kappa solves 2 kappa^3 = rhs(kappa)."""
    roots = _kappa_roots(sources)
    if not roots:
        raise NoBoundStateError(
            "secular equation has no positive root: no negative-energy "
            "bound state for these couplings")
    if len(roots) > 1:
        warnings.warn(f"secular equation has {len(roots)} positive roots "
                      f"{roots}; returning the largest kappa (lowest energy)",
                      RuntimeWarning, stacklevel=2)
    kappa = max(roots)
    d, _ = sources._matrix()
    c = np.array(sources.couplings)
    # amplitudes per unit phi0, then normalise
    a = -c / (2 * kappa)
    overlap = np.real(np.conj(a) @ ((1 / kappa + d) * np.exp(-kappa * d)) @ a)
    norm = math.sqrt(1 + overlap)
    # phase convention of the one-source case, -|c|/c with c -> sum c_i
    total = complex(np.sum(c))
    phase = abs(total) / total if total != 0 else 1.0
    phi0 = -phase / norm
    return MultiGroundState(kappa, -kappa**2, phi0,
                            tuple(complex(v) for v in a * phi0),
                            sources.positions)


def interaction_energy(c1, c2, R: float) -> float:
    """Two-source ground-state energy E(R) = -kappa(R)^2."""
    R = abs(float(R))
    c1 = complex(c1.c if isinstance(c1, Coupling) else c1)
    c2 = complex(c2.c if isinstance(c2, Coupling) else c2)
    if R == 0:
        total = c1 + c2
        if total == 0:
            raise NoBoundStateError(
                "c1 + c2 = 0 at R = 0: the merged source is decoupled")
        return -((abs(total) ** 2 / 2) ** (2 / 3))
    return ground_state_multi(SourceArray([0.0, R], [c1, c2])).energy


def coulomb_slope(c1, c2) -> float:
    c1, c2 = complex(c1), complex(c2)
    return ((c1.conjugate() * c2 + c2.conjugate() * c1) / 3).real


def linear_energy(c1, c2, R: float) -> float:
    """Small-separation approximation E(0) + slope * |R|."""
    c1, c2 = complex(c1), complex(c2)
    return -((abs(c1 + c2) ** 2 / 2) ** (2 / 3)) + coulomb_slope(c1, c2) * abs(R)


def scattering_state_multi(sources: SourceArray, k: float) -> MultiScatteringState:
    if k == 0:
        raise ValueError("scattering states are defined for k != 0")
    ak = abs(k)
    d, cc = sources._matrix()
    x = np.array(sources.positions)
    c = np.array(sources.couplings)
    denom = 2j * ak**3 - np.sum(cc * np.exp(1j * ak * d))
    if abs(denom) == 0:
        raise ResonanceError(f"vanishing denominator at k={k}")
    phi0 = 2j * ak * np.sum(np.conj(c) * np.exp(1j * k * x)) / (SQRT_2PI * denom)
    b = SQRT_2PI * c * phi0 / (2j * ak)
    return MultiScatteringState(k, complex(phi0), tuple(complex(v) for v in b),
                                sources.positions)


def energy_curve(c1=1.0, c2=1.0, r_max: float = 50.0, n: int = 200):
    """(R, E, E_linear) rows on a log grid over [1e-3, r_max] plus R = 0."""
    rs = np.concatenate([[0.0], np.geomspace(1e-3, r_max, n)])
    return [(r, interaction_energy(c1, c2, r), linear_energy(c1, c2, r))
            for r in rs]
