"""Named verification suites with residuals and tolerances, shared by the
command line and scripts/run_verification.py."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from . import oracle
from .box import BoxSpec, box_ground_energy, box_positive_levels
from .graph import build_graph, graph_spectrum
from .numerics import integrate
from .single_source import (Coupling, evolve_eigen_superposition, flux_balance,
                            ground_state, scattering_state)

SUITES = ("orthonormality", "completeness", "flux", "oracle")
ORACLE_TARGETS = ("line", "box", "graph")


@dataclass(frozen=True)
class Check:
    name: str
    residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.residual <= self.tolerance)

    def as_dict(self) -> dict:
        return {**asdict(self), "passed": self.passed}


def orthonormality(c=1.0, k=1.0, kp=2.0, k_ground=0.7):
    out = []
    r = oracle.verify_orthonormality(c, k, kp)
    for key in ("scattering_vacuum_vs_closed", "scattering_remainder_vs_closed",
                "scattering_cancellation"):
        out.append(Check(f"{key} (k={k}, k'={kp})", float(r[key]), 1e-13))
    r = oracle.verify_orthonormality(c, k_ground, kp)
    for key in ("ground_vacuum_vs_reference", "ground_particle_vs_reference",
                "ground_cancellation"):
        out.append(Check(f"{key} (k={k_ground})", float(r[key]), 1e-13))
    out.append(Check(f"ground_quadrature (k={k_ground})", float(r["ground_quadrature"]), 1e-7))
    return out


def completeness(c=1.0, points=(0.1, 0.5, 1.0, 2.0, 3.0), x_smeared=0.5, width=0.05):
    out = [Check("relation_i", oracle.completeness_i(c), 1e-10)]
    for x in points:
        out.append(Check(f"relation_ii x={x}", abs(oracle.completeness_ii(c, x)), 1e-7))
    out.append(Check(f"relation_iii_smeared x={x_smeared} width={width}",
                     abs(oracle.completeness_iii_smeared(c, x_smeared, x_smeared, width)),
                     1e-5))
    return out


def flux(c=1.0, ks=(0.5, 1.0, 2.0, -1.5)):
    """Stationary states: both flux components vanish. A superposition of
    the ground state and one scattering state: the two components agree."""
    c = Coupling(c)
    out = []
    g = ground_state(c)
    out.append(Check("ground state", max(map(abs, flux_balance(g.as_state(), c))), 1e-10))
    for k in ks:
        s = scattering_state(c, k)
        out.append(Check(f"scattering k={k}", max(map(abs, flux_balance(s.as_state(), c))),
                         1e-10))
    sup = evolve_eigen_superposition([g, scattering_state(c, 1.0)], [0.8, 0.6], 0.3)
    a, b = flux_balance(sup, c)
    out.append(Check("superposition: current jump = d|phi0|^2/dt", abs(a - b), 1e-8))
    return out


def _weights_by_quadrature(c):
    g = ground_state(c)
    w1 = integrate(lambda x: abs(g.phi1(x)) ** 2, -np.inf, np.inf, points=[0.0])
    return abs(g.phi0) ** 2, w1.real


def oracle_suite(target="line", c=None, h=None):
    out = []
    if target == "line":
        c = 1.0 if c is None else c
        h = 2e-3 if h is None else h
        kap = Coupling(c).kappa
        L = math.ceil(20 / kap / h) * h
        E = oracle.richardson_levels(lambda hh: oracle.line_lattice(c, L, hh), h, 1)[0]
        out.append(Check("line ground energy (lattice, Richardson)", abs(E + kap**2), 1e-3))
    elif target == "box":
        c = 20.0 if c is None else c
        h = 2e-3 if h is None else h
        spec = BoxSpec(0.5, 0.5, Coupling(c))
        exact = [box_ground_energy(spec)] + box_positive_levels(spec, 400.0)[:4]
        got = oracle.richardson_levels(lambda hh: oracle.box_lattice(spec, hh), h, 5)
        for i, (a, b) in enumerate(zip(got, exact)):
            out.append(Check(f"box level {i}", abs(a - b), 1e-3))
    elif target == "graph":
        h = 5e-3 if h is None else h
        g = build_graph([(0, 1, 1.0), (1, 2, 1.3), (0, 2, 0.8), (2, 3, 0.6)],
                        [1.0, 0.5 + 0.5j, 0.0, 0.7])
        exact = graph_spectrum(g, E_max=20.0)[:5]
        got = oracle.richardson_levels(lambda hh: oracle.graph_lattice(g, hh), h, len(exact))
        for i, (a, b) in enumerate(zip(got, exact)):
            out.append(Check(f"graph level {i}", abs(a - b), 1e-3))
    else:
        raise ValueError(f"unknown oracle target {target!r}")
    out.append(Check("discrete self-adjointness", self_adjointness_defect(), 1e-12))
    return out


def self_adjointness_defect(pairs=100, seed=0, c=0.7 - 0.4j, h=0.05):
    """max |<Hu, v> - <u, Hv>| / (|u||v||H|) over random pairs."""
    rng = np.random.default_rng(seed)
    m = oracle.interval_lattice(-2.0, 3.0, [0.0, 1.0], [c, 0.3j], h)
    scale = 4 / h**2
    worst = 0.0
    for _ in range(pairs):
        u = rng.normal(size=m.dim) + 1j * rng.normal(size=m.dim)
        v = rng.normal(size=m.dim) + 1j * rng.normal(size=m.dim)
        d = m.inner(m.apply(u), v) - m.inner(u, m.apply(v))
        nrm = math.sqrt(m.inner(u, u).real * m.inner(v, v).real) * scale
        worst = max(worst, abs(d) / nrm)
    return worst


def run(suite, **kw):
    if suite == "orthonormality":
        return orthonormality(**kw)
    if suite == "completeness":
        return completeness(**kw)
    if suite == "flux":
        return flux(**kw)
    if suite == "oracle":
        return oracle_suite(**kw)
    raise ValueError(f"unknown suite {suite!r}")
