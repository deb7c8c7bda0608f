"""Independent checks: a finite-difference lattice for the 0-1 sector
model, Crank-Nicolson evolution on it, and quadrature versions of the
orthonormality and completeness relations of the one-source eigenbasis.

Lattice conventions. One-particle amplitudes live on nodes with weights
w_i (h on an interval interior, sum of h_e/2 at graph vertices); the
vacuum amplitude has weight 1. The Hamiltonian is H = W^-1 A with A
Hermitian: the usual stiffness matrix of -d^2/dx^2 plus c at (source,
vacuum) and conj(c) at (vacuum, source). On an interval node this is the
3-point Laplacian plus (c/h) phi0 in the source row, which reproduces the
jump [phi1'] = c phi0 as h -> 0.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .numerics import erfcx_complex, integrate, integrate_fourier, richardson
from .single_source import (SQRT_2PI, Coupling, ground_state, k11,
                            scattering_state)


# ---------------------------------------------------------------------------
# lattice model
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DiscreteState:
    phi0: np.ndarray  # vacuum amplitudes (length 1 for a shared vacuum)
    phi1: np.ndarray  # node amplitudes

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.phi1, np.atleast_1d(self.phi0)]).astype(complex)


@dataclass(frozen=True, eq=False)
class LatticeModel:
    weights: np.ndarray
    stiffness: sp.csr_matrix
    source_nodes: tuple
    couplings: tuple
    vacuum_of_source: tuple  # vacuum index for each source
    h: float
    x: np.ndarray | None = None  # node coordinates for interval problems

    @property
    def n_nodes(self) -> int:
        return len(self.weights)

    @property
    def n_vac(self) -> int:
        return max(self.vacuum_of_source) + 1 if self.vacuum_of_source else 0

    @property
    def dim(self) -> int:
        return self.n_nodes + self.n_vac

    def full_weights(self) -> np.ndarray:
        return np.concatenate([self.weights, np.ones(self.n_vac)])

    def matrix_A(self) -> sp.csr_matrix:
        n = self.n_nodes
        A = sp.lil_matrix((self.dim, self.dim), dtype=complex)
        for s, c, v in zip(self.source_nodes, self.couplings, self.vacuum_of_source):
            A[s, n + v] += c
            A[n + v, s] += np.conj(c)
        K = sp.block_diag([self.stiffness, sp.csr_matrix((self.n_vac, self.n_vac))])
        return (K + A.tocsr()).tocsr()

    def symmetric(self) -> sp.csr_matrix:
        """W^-1/2 A W^-1/2, unitarily equivalent to H."""
        d = sp.diags(1 / np.sqrt(self.full_weights()))
        return (d @ self.matrix_A() @ d).tocsr()

    def apply(self, u: np.ndarray) -> np.ndarray:
        return (self.matrix_A() @ u) / self.full_weights()

    def inner(self, u: np.ndarray, v: np.ndarray) -> complex:
        return complex(np.sum(np.conj(u) * v * self.full_weights()))

    def split(self, u: np.ndarray) -> DiscreteState:
        return DiscreteState(u[self.n_nodes:], u[: self.n_nodes])


def _chain_stiffness(n: int, h: float) -> sp.csr_matrix:
    main = np.full(n, 2 / h)
    off = np.full(n - 1, -1 / h)
    return sp.diags([off, main, off], [-1, 0, 1], format="csr")


def interval_lattice(a: float, b: float, positions, couplings, h: float) -> LatticeModel:
    """Dirichlet interval [a, b] with sources at grid points, shared vacuum.
    Sources with c = 0 are dropped."""
    n_seg = round((b - a) / h)
    if abs(n_seg * h - (b - a)) > 1e-9 * max(1.0, b - a):
        raise ValueError("interval length must be a multiple of h")
    x = a + h * np.arange(1, n_seg)
    # decoupled sources would only add a spurious E = 0 vacuum level
    kept = [(p, complex(c)) for p, c in zip(positions, couplings) if c != 0]
    positions = [p for p, _ in kept]
    couplings = tuple(c for _, c in kept)
    nodes = []
    for p in positions:
        i = (p - a) / h - 1
        if abs(i - round(i)) > 1e-6 or not 0 <= round(i) < n_seg - 1:
            raise ValueError(f"source at {p} is not an interior grid point")
        nodes.append(int(round(i)))
    return LatticeModel(np.full(n_seg - 1, h), _chain_stiffness(n_seg - 1, h),
                        tuple(nodes), couplings, tuple(0 for _ in nodes), h, x)


def line_lattice(c, L: float, h: float) -> LatticeModel:
    """One source at 0 in [-L, L]."""
    c = c.c if isinstance(c, Coupling) else c
    return interval_lattice(-L, L, [0.0], [c], h)


def box_lattice(spec, h: float) -> LatticeModel:
    return interval_lattice(-spec.l1, spec.l2, [0.0], [spec.coupling.c], h)


def graph_lattice(graph, h: float, variant: str = "shared") -> LatticeModel:
    """Per-edge uniform grids of spacing about h joined at the vertices.

    Dirichlet vertices are removed; other vertices get the natural
    (Kirchhoff) condition plus their source coupling. In the trapped
    variant only vertices with c != 0 carry a vacuum amplitude.
    """
    index = {}
    weights = []
    for v in range(graph.num_vertices):
        if graph.boundary[v] != "dirichlet":
            index[v] = len(weights)
            weights.append(0.0)
    rows, cols, vals = [], [], []

    def link(a, b, hh):
        for i, j, s in ((a, a, 1), (b, b, 1), (a, b, -1), (b, a, -1)):
            if i is not None and j is not None:
                rows.append(i)
                cols.append(j)
                vals.append(s / hh)

    for j, k, l in graph.edges:
        n = max(2, round(l / h))
        hh = l / n
        chain = [index.get(j)]
        for _ in range(n - 1):
            chain.append(len(weights))
            weights.append(hh)
        chain.append(index.get(k))
        for end in (j, k):
            if end in index:
                weights[index[end]] += hh / 2
        for a, b in zip(chain, chain[1:]):
            link(a, b, hh)
    n_nodes = len(weights)
    K = sp.csr_matrix((vals, (rows, cols)), shape=(n_nodes, n_nodes))
    nodes, cs, vac = [], [], []
    for v in range(graph.num_vertices):
        c = graph.couplings[v]
        if c == 0:
            continue
        nodes.append(index[v])
        cs.append(c)
        vac.append(0 if variant == "shared" else len(vac))
    return LatticeModel(np.array(weights), K, tuple(nodes), tuple(cs), tuple(vac), h)


def lattice_spectrum(model: LatticeModel, num_levels: int = 6,
                     sigma: float | None = None, return_vectors: bool = False):
    """Lowest eigenvalues of the lattice Hamiltonian (shift-invert Lanczos;
    dense below 2000 unknowns)."""
    Ht = model.symmetric()
    if model.dim <= 2000:
        w, V = np.linalg.eigh(Ht.toarray())
        w, V = w[:num_levels], V[:, :num_levels]
    else:
        if sigma is None:
            total = sum(abs(c) for c in model.couplings)
            sigma = -1.5 * (total**2 / 2) ** (2 / 3) - 1.0
        if all(complex(c).imag == 0 for c in model.couplings):
            Ht = Ht.real
        w, V = spla.eigsh(Ht, k=num_levels, sigma=sigma, which="LM")
        order = np.argsort(w)
        w, V = w[order], V[:, order]
    if not return_vectors:
        return w
    # back to the weighted representation, unit weighted norm
    V = V / np.sqrt(model.full_weights())[:, None]
    return w, V


def richardson_levels(build, h: float, num_levels: int = 6, order: float = 2.0):
    """Levels at h and h/2 combined to remove the h**order error term."""
    a = lattice_spectrum(build(h), num_levels)
    b = lattice_spectrum(build(h / 2), num_levels)
    return np.array([richardson([x, y], 2.0, (order,)).real for x, y in zip(a, b)])


def convergence_order(values) -> float:
    """Observed order from three results at h, h/2, h/4."""
    a, b, c = values
    return math.log2(abs((a - b) / (b - c)))


# ---------------------------------------------------------------------------
# time evolution
# ---------------------------------------------------------------------------

def crank_nicolson_evolve(model: LatticeModel, initial: DiscreteState, t_final: float,
                          dt: float, observe=None) -> DiscreteState:
    """Implicit-midpoint steps of size dt (last step shortened to hit t_final).

    ``observe(t, state_vector)`` is called after every step if given.
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    sw = np.sqrt(model.full_weights())
    psi = initial.as_vector() * sw
    Ht = model.symmetric().astype(complex)
    eye = sp.identity(model.dim, dtype=complex, format="csc")
    n_full = int(t_final / dt + 1e-9)
    rest = t_final - n_full * dt

    def stepper(tau):
        lu = spla.splu((eye + 0.5j * tau * Ht).tocsc())
        B = (eye - 0.5j * tau * Ht).tocsr()
        return lambda v: lu.solve(B @ v)

    step = stepper(dt)
    t = 0.0
    for _ in range(n_full):
        psi = step(psi)
        t += dt
        if observe is not None:
            observe(t, psi / sw)
    if rest > 1e-12 * dt:
        psi = stepper(rest)(psi)
        if observe is not None:
            observe(t_final, psi / sw)
    return model.split(psi / sw)


def vacuum_state(model: LatticeModel) -> DiscreteState:
    phi0 = np.zeros(model.n_vac, dtype=complex)
    phi0[0] = 1.0
    return DiscreteState(phi0, np.zeros(model.n_nodes, dtype=complex))


def gaussian_packet(model: LatticeModel, center: float, width: float) -> DiscreteState:
    """phi1 = exp(-(x-center)^2 / (2 width^2)) / (width sqrt(2 pi)),
    a unit-mass bump; the vacuum starts empty."""
    g = np.exp(-((model.x - center) ** 2) / (2 * width**2)) / (width * SQRT_2PI)
    return DiscreteState(np.zeros(model.n_vac, dtype=complex), g.astype(complex))


def smeared_k11(c, x: float, t: float, center: float, width: float) -> complex:
    """Closed-form K11(x, ., t) integrated against the same Gaussian."""
    lo, hi = center - 12 * width, center + 12 * width

    def f(z):
        g = math.exp(-((z - center) ** 2) / (2 * width**2)) / (width * SQRT_2PI)
        return complex(k11(c, x, z, t)) * g

    return integrate(f, lo, hi, points=[0.0, center], tol=1e-11)


def kernel_vs_pde(c, x: float, t: float, center: float, width: float,
                  h: float, dt_over_h: float = 0.25, L: float = 40.0):
    """Crank-Nicolson value of phi1(x, t) from a Gaussian packet, at h and
    h/2 (dt proportional to h) and their Richardson combination, next to
    the closed-form value."""
    vals = []
    for hh in (h, h / 2):
        model = line_lattice(c, L, hh)
        out = crank_nicolson_evolve(model, gaussian_packet(model, center, width),
                                    t, dt_over_h * hh)
        i = int(round((x + L) / hh)) - 1
        vals.append(complex(out.phi1[i]))
    exact = smeared_k11(c, x, t, center, width)
    return {"coarse": vals[0], "fine": vals[1],
            "extrapolated": richardson(vals, 2.0, (2,)), "exact": exact}


# ---------------------------------------------------------------------------
# stationary lattice problems with exact outgoing boundary rows
# ---------------------------------------------------------------------------

def _outgoing_lambda(E: complex, h: float) -> complex:
    """Root of lam + 1/lam = 2 - E h^2 that decays or moves outwards."""
    q = 2 - E * h * h
    lam = q / 2 + cmath.sqrt(q * q / 4 - 1)
    lam2 = 1 / lam
    for cand in (lam, lam2):
        if abs(cand) < 1 - 1e-14:
            return cand
    return lam if lam.imag > 0 else lam2


def _open_system(a, b, positions, couplings, h, E):
    model = interval_lattice(a, b, positions, couplings, h)
    lam = _outgoing_lambda(E, h)
    W = sp.diags(model.full_weights())
    M = (E * W - model.matrix_A()).tolil()
    # the missing neighbours at both ends follow phi_{outside} = lam * phi_edge
    n = model.n_nodes
    M[0, 0] += lam / h
    M[n - 1, n - 1] += lam / h
    return model, M.tocsc(), lam


def lattice_resolvent(positions, couplings, E: complex, h: float, margin: float = 10.0,
                      y: float | None = None):
    """(E - H)^-1 on an open lattice.

    With ``y`` given the columns are G11(., y) on the nodes and G01(y) in
    the vacuum; with y None the source is the vacuum and they are G10(.)
    and G00. Returned as (x, phi1, phi0).
    """
    a = min(positions) - margin
    b = max(positions) + margin
    model, M, _ = _open_system(a, b, positions, couplings, h, E)
    rhs = np.zeros(model.dim, dtype=complex)
    if y is None:
        rhs[model.n_nodes] = 1.0
    else:
        rhs[int(round((y - a) / h)) - 1] = 1.0
    u = spla.spsolve(M, rhs)
    return model.x, u[: model.n_nodes], u[model.n_nodes:]


def lattice_scattering(positions, couplings, k: float, h: float, margin: float = 5.0):
    """Wave exp(ikx)/sqrt(2 pi) incident from the left (k > 0).

    Uses the lattice wavenumber q = arccos(1 - E h^2 / 2) / h of the
    energy E = k^2. Returns dict with phi0, reflection, transmission.
    """
    E = k * k
    a = min(positions) - margin
    b = max(positions) + margin
    model, M, lam = _open_system(a, b, positions, couplings, h, E)
    x0 = model.x[0]
    inc = np.exp(1j * k * x0) / SQRT_2PI  # incident amplitude at node 0
    rhs = np.zeros(model.dim, dtype=complex)
    # row 0: the outside value is lam*phi_0 + inc*(1/lam - lam)
    rhs[0] = -inc * (1 / lam - lam) / h
    u = spla.spsolve(M, rhs)
    phi = u[: model.n_nodes]
    q = math.acos(1 - E * h * h / 2) / h
    r = (phi[0] - inc) * SQRT_2PI / np.exp(-1j * q * x0)
    t = phi[-1] * SQRT_2PI / np.exp(1j * q * model.x[-1])
    return {"phi0": complex(u[model.n_nodes]), "reflection": complex(r),
            "transmission": complex(t), "q": q}


# ---------------------------------------------------------------------------
# orthonormality and completeness of the one-source eigenbasis
# ---------------------------------------------------------------------------

def verify_orthonormality(c, k: float, kp: float, quadrature: bool = True) -> dict:
    """Residuals of the closed-form cancellations.

    ``ground_*``: vacuum and particle parts of <phi_g, phi_k> computed from
    the module's states; they must cancel. ``scattering``: the vacuum
    product conj(phi0_k') phi0_k plus the non-delta remainder of the
    particle overlap must vanish. ``ground_quadrature`` evaluates
    <phi_g, phi_k> by direct (absolutely convergent) quadrature.
    """
    c = c if isinstance(c, Coupling) else Coupling(c)
    g = ground_state(c)
    s = scattering_state(c, k)
    sp_ = scattering_state(c, kp)
    kap = c.kappa
    ak, akp = abs(k), abs(kp)
    b, bp = s.b_k, sp_.b_k
    vac = np.conj(g.phi0) * s.phi0
    # particle overlap: exponential integrals done by hand
    A = g.amplitude_A
    part = A / SQRT_2PI * (2 * kap / (kap * kap + k * k) + b * 2 / (kap - 1j * ak))
    # the displayed reference values
    ref = math.sqrt(2 / (3 * math.pi)) * math.sqrt(k * k * kap**3) / (ak**3 + 1j * kap**3)
    out = {
        "ground_vacuum_vs_reference": abs(vac + ref),
        "ground_particle_vs_reference": abs(part - ref),
        "ground_cancellation": abs(vac + part),
    }
    vac_ss = np.conj(sp_.phi0) * s.phi0
    rest = (0.5j / math.pi * (b + np.conj(bp) + 2 * b * np.conj(bp)) / (ak - akp)
            + 0.5j / math.pi * (b - np.conj(bp)) / (ak + akp)) if ak != akp else None
    closed = -akp * ak * kap**3 / (math.pi * (ak**3 + 1j * kap**3) * (akp**3 - 1j * kap**3))
    out["scattering_vacuum_vs_closed"] = abs(vac_ss + closed)
    if rest is not None:
        out["scattering_remainder_vs_closed"] = abs(rest - closed)
        out["scattering_cancellation"] = abs(vac_ss + rest)
    if quadrature:
        f = lambda x: np.conj(g.phi1(x)) * s.phi1(x)
        ov = integrate(f, -np.inf, np.inf, points=[0.0], tol=1e-13)
        out["ground_quadrature"] = abs(vac + ov)
    return out


def completeness_i(c) -> float:
    c = c if isinstance(c, Coupling) else Coupling(c)
    g = ground_state(c)

    def f(k):
        return abs(scattering_state(c, k).phi0) ** 2 if k != 0 else 0.0

    total = abs(g.phi0) ** 2 + 2 * integrate(f, 0.0, np.inf, tol=1e-13)
    return abs(total - 1)


def completeness_ii(c, x: float) -> complex:
    """conj(phi_g^0) phi_g^1(x) + int conj(phi_k^0) phi_k^1(x) dk.

    The k > 0 and k < 0 halves combine into
    int_0^inf [alpha(k) cos(k|x|) + beta(k) sin(k|x|)] dk, done with a
    Fourier-weighted rule.
    """
    c = c if isinstance(c, Coupling) else Coupling(c)
    g = ground_state(c)
    ax = abs(x)

    def alpha(k):
        s = scattering_state(c, k)
        return np.conj(s.phi0) * 2 / SQRT_2PI * (1 + s.b_k)

    def beta(k):
        s = scattering_state(c, k)
        return np.conj(s.phi0) * 2 / SQRT_2PI * 1j * s.b_k

    def safe(f):
        return lambda k: f(k) if k > 0 else 0.0

    I = (integrate_fourier(safe(alpha), ax, "cos", tol=1e-12)
         + integrate_fourier(safe(beta), ax, "sin", tol=1e-12))
    return np.conj(g.phi0) * complex(g.phi1(x)) + I


def _half_line_ft(q, mu, sigma):
    """int_0^inf N(y; mu, sigma) exp(-i q y) dy for real q."""
    z = -(mu - 1j * q * sigma**2) / (sigma * math.sqrt(2))
    # exp(-iq mu - q^2 s^2/2) erfc(z) with the Gaussian factors merged
    g = math.exp(-mu * mu / (2 * sigma**2))
    if z.real >= 0:
        return 0.5 * g * erfcx_complex(z)
    return np.exp(-1j * q * mu - q * q * sigma**2 / 2) - 0.5 * g * erfcx_complex(-z)


def completeness_iii_smeared(c, x: float, center: float = 0.5, width: float = 0.05,
                             k_max: float | None = None) -> complex:
    """Left side of the third relation integrated against a normalised
    Gaussian in y, minus the Gaussian at x (should vanish)."""
    c = c if isinstance(c, Coupling) else Coupling(c)
    g = ground_state(c)
    kap = c.kappa
    mu, sig = center, width
    k_max = k_max if k_max is not None else 40 / width

    def gauss(y):
        return math.exp(-((y - mu) ** 2) / (2 * sig**2)) / (sig * SQRT_2PI)

    # ground-state part; int N(y) exp(-kappa |y|) dy in closed form
    e_abs = _abs_exp_moment(kap, mu, sig)
    ground = kap / 3 * math.exp(-kap * abs(x)) * e_abs

    def f(k):
        s = scattering_state(c, k)
        ak = abs(k)
        full = np.exp(-1j * k * mu - k * k * sig**2 / 2)
        folded = _half_line_ft(ak, mu, sig) + _half_line_ft(ak, -mu, sig)
        smeared_conj = (full + np.conj(s.b_k) * folded) / SQRT_2PI
        return smeared_conj * complex(s.phi1(x))

    pts = list(np.linspace(-k_max, k_max, 81))
    I = integrate(f, -k_max, k_max, points=pts, tol=1e-10, limit=2000)
    return ground + I - gauss(x)


def _abs_exp_moment(kap, mu, sig):
    """int N(y; mu, sig) exp(-kap |y|) dy."""
    def half(m):
        # int_0^inf N(y; m, sig) exp(-kap y) dy
        return 0.5 * math.exp(-kap * m + kap**2 * sig**2 / 2) * math.erfc(
            (kap * sig**2 - m) / (sig * math.sqrt(2)))
    return half(mu) + half(-mu)


def verify_completeness(c, x: float, y: float | None = None,
                        width: float = 0.05) -> dict:
    """Residuals of the three relations; the third is smeared over y with a
    Gaussian of the given width centred at ``y`` (default x)."""
    y = x if y is None else y
    return {
        "relation_i": completeness_i(c),
        "relation_ii": abs(completeness_ii(c, x)),
        "relation_iii_smeared": abs(completeness_iii_smeared(c, x, center=y, width=width)),
    }
