"""Metric graphs with IBC vertices, 0-1 particle sectors.

Two vacuum models: ``shared`` (one vacuum amplitude, a particle can be
annihilated at one vertex and re-created at another) and ``trapped``
(one vacuum amplitude per vertex).

On edge (j, k) the coordinate x runs from 0 at vertex j to l at vertex k.
The wavefunction there is alpha * C(x) + beta * S(x) with
C = cos(kx), S = sin(kx)/k for E = k^2 > 0 and
C = exp(-kappa x), S = exp(-kappa (l - x)) for E = -kappa^2 < 0.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .numerics import Bracket, solve_root

VARIANTS = ("shared", "trapped")
BOUNDARY = ("ibc", "dirichlet", "kirchhoff")


class GraphError(ValueError):
    pass


class DegenerateEigenvalue(RuntimeWarning):
    pass


@dataclass(frozen=True)
class MetricGraph:
    num_vertices: int
    edges: tuple  # ((j, k, length), ...) with j < k
    couplings: tuple
    boundary: tuple  # per-vertex condition, see BOUNDARY

    @property
    def adjacency(self) -> np.ndarray:
        a = np.zeros((self.num_vertices, self.num_vertices), dtype=int)
        for j, k, _ in self.edges:
            a[j, k] = a[k, j] = 1
        return a

    @property
    def valency(self) -> np.ndarray:
        return self.adjacency.sum(axis=1)

    def length(self, j: int, k: int) -> float:
        for a, b, l in self.edges:
            if {a, b} == {j, k}:
                return l
        raise KeyError((j, k))

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @property
    def l_max(self) -> float:
        return max(l for _, _, l in self.edges)

    def ends(self, v: int):
        """(edge index, 0 for the x=0 end or 1 for the x=l end) at vertex v."""
        out = []
        for i, (j, k, _) in enumerate(self.edges):
            if j == v:
                out.append((i, 0))
            elif k == v:
                out.append((i, 1))
        return out


def build_graph(edge_list, couplings, boundary=None) -> MetricGraph:
    """Validate a simple metric graph.

    ``edge_list`` holds (j, k, length) triples; ``couplings`` one complex
    number per vertex. ``boundary`` optionally maps vertex -> "dirichlet"
    or "kirchhoff" (both need c_j = 0; Dirichlet also valency 1).
    """
    couplings = tuple(complex(c) for c in couplings)
    nv = len(couplings)
    seen = set()
    edges = []
    for j, k, l in edge_list:
        j, k, l = int(j), int(k), float(l)
        if not (0 <= j < nv and 0 <= k < nv):
            raise GraphError(f"edge ({j}, {k}) refers to an unknown vertex")
        if j == k:
            raise GraphError(f"loop at vertex {j}: only simple graphs are supported")
        key = (min(j, k), max(j, k))
        if key in seen:
            raise GraphError(f"multiple edges between {key[0]} and {key[1]}")
        if not (l > 0 and math.isfinite(l)):
            raise GraphError(f"edge {key} has non-positive length {l}")
        seen.add(key)
        edges.append((key[0], key[1], l))
    if not edges:
        raise GraphError("graph has no edges")
    flags = ["ibc"] * nv
    for v, flag in (dict(boundary or {})).items():
        if flag not in BOUNDARY:
            raise GraphError(f"unknown boundary condition {flag!r}")
        flags[int(v)] = flag
    g = MetricGraph(nv, tuple(edges), couplings, tuple(flags))
    d = g.valency
    for v in range(nv):
        if d[v] == 0:
            raise GraphError(f"vertex {v} is isolated")
        if flags[v] != "ibc" and couplings[v] != 0:
            raise GraphError(f"vertex {v}: {flags[v]} needs zero coupling")
        if flags[v] == "dirichlet" and d[v] != 1:
            raise GraphError(f"vertex {v}: Dirichlet needs valency 1")
    return g


def insert_vertex(graph: MetricGraph, j: int, k: int, x: float, c) -> MetricGraph:
    """Put a source on edge (j, k) at distance x from j."""
    l = graph.length(j, k)
    if not 0 < x < l:
        raise GraphError("inserted vertex must lie strictly inside the edge")
    new = graph.num_vertices
    edges = [(a, b, ll) for a, b, ll in graph.edges if {a, b} != {j, k}]
    edges += [(j, new, x), (new, k, l - x)]
    boundary = {v: f for v, f in enumerate(graph.boundary) if f != "ibc"}
    return build_graph(edges, list(graph.couplings) + [c], boundary)


# ---------------------------------------------------------------------------
# secular system
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SecularSystem:
    matrix: np.ndarray
    k_or_kappa: float
    variant: str
    sign: str  # "positive-energy" or "negative-energy"


def _end_rows(E: float, l: float):
    """(value at x=0, outgoing derivative at x=0, value at x=l,
    outgoing derivative at x=l) as coefficient pairs for (alpha, beta)."""
    if E > 0:
        k = math.sqrt(E)
        c, s = math.cos(k * l), math.sin(k * l)
        return ((1.0, 0.0), (0.0, 1.0), (c, s / k), (k * s, -c))
    kappa = math.sqrt(-E)
    e = math.exp(-kappa * l)
    return ((1.0, e), (-kappa, kappa * e), (e, 1.0), (kappa * e, -kappa))


def secular_system(graph: MetricGraph, E: float, variant: str = "shared") -> SecularSystem:
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}")
    if E == 0:
        raise ValueError("E = 0 is excluded")
    ne, nv = graph.num_edges, graph.num_vertices
    nvac = 1 if variant == "shared" else nv
    dim = 2 * ne + nvac
    complex_c = any(c.imag != 0 for c in graph.couplings)
    M = np.zeros((dim, dim), dtype=complex if complex_c else float)
    cs = [c if complex_c else c.real for c in graph.couplings]
    ends = [_end_rows(E, l) for _, _, l in graph.edges]

    def put(row, edge, end, what, scale=1.0):
        coeff = ends[edge][2 * end + what]
        M[row, 2 * edge] += scale * coeff[0]
        M[row, 2 * edge + 1] += scale * coeff[1]

    row = 0
    for v in range(nv):
        inc = graph.ends(v)
        first = inc[0]
        for other in inc[1:]:
            put(row, *first, 0)
            put(row, *other, 0, -1.0)
            row += 1
        if graph.boundary[v] == "dirichlet":
            put(row, *first, 0)
        else:
            for e in inc:
                put(row, *e, 1)
            vac = 2 * ne + (0 if variant == "shared" else v)
            M[row, vac] -= cs[v]
        row += 1
    # vacuum sector: E phi0 = sum conj(c_j) phi(v_j)
    for v in range(nv):
        r = row if variant == "shared" else row + v
        M[r, 2 * ne + (0 if variant == "shared" else v)] = E
        put(r, *graph.ends(v)[0], 0, -np.conj(cs[v]))
    return SecularSystem(M, math.sqrt(abs(E)), variant,
                         "positive-energy" if E > 0 else "negative-energy")


def _equilibrate(M, sweeps: int = 4):
    """Positive row/column scalings (powers of two) so that every row and
    column has max-norm of order one. Returns (scaled, row_scale, col_scale).
    """
    A = M.copy()
    r = np.ones(A.shape[0])
    c = np.ones(A.shape[1])
    for _ in range(sweeps):
        m = np.max(np.abs(A), axis=1)
        s = np.where(m > 0, 2.0 ** -np.round(np.log2(np.where(m > 0, m, 1))), 1.0)
        A *= s[:, None]
        r *= s
        m = np.max(np.abs(A), axis=0)
        s = np.where(m > 0, 2.0 ** -np.round(np.log2(np.where(m > 0, m, 1))), 1.0)
        A *= s[None, :]
        c *= s
    return A, r, c


def secular_determinant(graph: MetricGraph, E: float, variant: str = "shared"):
    """Determinant of the secular matrix (raw, unscaled)."""
    return np.linalg.det(secular_system(graph, E, variant).matrix)


def _scaled_sign(graph, E, variant, phase):
    """Sign of the equilibrated determinant, rotated by ``phase``."""
    A, _, _ = _equilibrate(secular_system(graph, E, variant).matrix)
    sgn, logdet = np.linalg.slogdet(A)
    val = sgn * np.conj(phase)
    return float(np.real(val)) * math.exp(min(logdet, 700.0))


def singular_ratio(graph: MetricGraph, E: float, variant: str = "shared") -> float:
    """sigma_min / sigma_max of the equilibrated secular matrix."""
    A, _, _ = _equilibrate(secular_system(graph, E, variant).matrix)
    s = np.linalg.svd(A, compute_uv=False)
    return float(s[-1] / s[0])


def _det_phase(graph, variant):
    # the phase of det is constant along the real E axis (checked in the
    # tests); read it off where the matrix is far from singular
    if not any(c.imag != 0 for c in graph.couplings):
        return 1.0
    best = None
    for E in np.linspace(0.1, 10.0, 23) / graph.l_max**2:
        A, _, _ = _equilibrate(secular_system(graph, E, variant).matrix)
        sgn, logdet = np.linalg.slogdet(A)
        if best is None or logdet > best[1]:
            best = (sgn, logdet)
    return best[0]


def _energy(k, positive):
    return k * k if positive else -k * k


def _scan_branch(graph, variant, k_lo, k_hi, step, positive, phase):
    """Roots in k (or kappa) on [k_lo, k_hi] from sign changes and from
    minima of the singular-value ratio (even multiplicity)."""
    n = max(int(math.ceil((k_hi - k_lo) / step)), 2)
    ks = np.linspace(k_lo, k_hi, n + 1)
    f = np.array([_scaled_sign(graph, _energy(k, positive), variant, phase) for k in ks])
    ratio = np.array([singular_ratio(graph, _energy(k, positive), variant) for k in ks])
    roots = []
    sign_roots = 0
    for i in range(n):
        if f[i] == 0:
            roots.append(ks[i])
        elif f[i] * f[i + 1] < 0:
            roots.append(solve_root(
                lambda k: _scaled_sign(graph, _energy(k, positive), variant, phase),
                Bracket(ks[i], ks[i + 1]), tol=1e-15))
            sign_roots += 1
    for i in range(1, n):
        if not (ratio[i] <= ratio[i - 1] and ratio[i] <= ratio[i + 1]):
            continue
        if any(ks[i - 1] <= r <= ks[i + 1] for r in roots):
            continue
        # the ratio is V-shaped at a root; golden section reaches full
        # precision where Brent's parabolic steps stop at sqrt(eps)
        res = minimize_scalar(lambda k: singular_ratio(graph, _energy(k, positive), variant),
                              bracket=(ks[i - 1], ks[i], ks[i + 1]), method="golden",
                              options={"xtol": 1e-15})
        if res.fun < 1e-9:
            roots.append(float(res.x))
    return sorted(roots), sign_roots


def graph_spectrum(graph: MetricGraph, E_min: float | None = None,
                   E_max: float = 100.0, variant: str = "shared",
                   with_multiplicity: bool = False) -> list:
    """Eigenvalues in [E_min, E_max] (E = 0 excluded), sorted.

    Degenerate levels appear once per independent eigenvector when
    ``with_multiplicity`` is set, otherwise once.
    """
    if E_min is None:
        total = sum(abs(c) for c in graph.couplings)
        E_min = -(2 * total**2) ** (2 / 3) - 1.0
    if not E_min < E_max:
        raise ValueError("need E_min < E_max")
    phase = _det_phase(graph, variant)
    step = math.pi / graph.l_max / 20
    found = []
    for positive, lo, hi in ((False, E_min, min(E_max, 0.0)),
                             (True, max(E_min, 0.0), E_max)):
        if hi <= lo:
            continue
        k_lo, k_hi = math.sqrt(abs(lo if positive else hi)), math.sqrt(abs(hi if positive else lo))
        k_lo = max(k_lo, 1e-6 * step)
        roots, census = _scan_branch(graph, variant, k_lo, k_hi, step, positive, phase)
        _, fine = _scan_branch(graph, variant, k_lo, k_hi, step / 2, positive, phase) \
            if census < 400 else (None, census)
        if fine != census:
            warnings.warn("sign-change census changed under grid refinement; "
                          "closely spaced levels may be missing",
                          RuntimeWarning, stacklevel=2)
        found += [_energy(k, positive) for k in roots]
    found = sorted(E for E in found if E_min <= E <= E_max)
    if not with_multiplicity:
        return found
    out = []
    for E in found:
        out += [E] * nullity(graph, E, variant)
    return out


def nullity(graph: MetricGraph, E: float, variant: str = "shared") -> int:
    A, _, _ = _equilibrate(secular_system(graph, E, variant).matrix)
    s = np.linalg.svd(A, compute_uv=False)
    return int(np.sum(s <= 1e-10 * s[0])) or 1


# ---------------------------------------------------------------------------
# eigenstates
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GraphState01:
    graph: MetricGraph
    energy: float
    phi0: object  # complex (shared) or tuple of complex (trapped)
    edge_coefficients: tuple  # ((alpha, beta), ...) per edge

    def phi1(self, edge: int, x, from_vertex: int | None = None):
        """Amplitude on ``edge`` at distance x from ``from_vertex``
        (default: the lower-numbered end)."""
        j, k, l = self.graph.edges[edge]
        x = np.asarray(x, dtype=float)
        if from_vertex is not None and from_vertex == k:
            x = l - x
        elif from_vertex not in (None, j):
            raise ValueError(f"vertex {from_vertex} is not an end of edge {edge}")
        a, b = self.edge_coefficients[edge]
        E = self.energy
        if E > 0:
            kk = math.sqrt(E)
            return a * np.cos(kk * x) + b * np.sin(kk * x) / kk
        kap = math.sqrt(-E)
        return a * np.exp(-kap * x) + b * np.exp(-kap * (l - x))

    def dphi1(self, edge: int, x):
        j, k, l = self.graph.edges[edge]
        a, b = self.edge_coefficients[edge]
        E = self.energy
        if E > 0:
            kk = math.sqrt(E)
            return -a * kk * np.sin(kk * x) + b * np.cos(kk * x)
        kap = math.sqrt(-E)
        return -kap * a * np.exp(-kap * x) + kap * b * np.exp(-kap * (l - x))

    @property
    def vacuum_weight(self) -> float:
        p = np.atleast_1d(np.asarray(self.phi0))
        return float(np.sum(np.abs(p) ** 2))

    @property
    def edge_weight(self) -> float:
        return 1.0 - self.vacuum_weight

    def residuals(self, variant: str = "shared") -> float:
        """Max violation of continuity, IBC and vacuum equations."""
        g = self.graph
        worst = 0.0
        vac = np.atleast_1d(np.asarray(self.phi0))
        total = 0j
        for v in range(g.num_vertices):
            vals, ders = [], []
            for e, end in g.ends(v):
                l = g.edges[e][2]
                x = 0.0 if end == 0 else l
                vals.append(complex(self.phi1(e, x)))
                d = complex(self.dphi1(e, x))
                ders.append(d if end == 0 else -d)
            worst = max(worst, max(abs(a - vals[0]) for a in vals))
            if g.boundary[v] == "dirichlet":
                worst = max(worst, abs(vals[0]))
            else:
                p0 = vac[0] if variant == "shared" else vac[v]
                worst = max(worst, abs(sum(ders) - g.couplings[v] * p0))
            if variant == "trapped":
                worst = max(worst, abs(self.energy * vac[v]
                                       - np.conj(g.couplings[v]) * vals[0]))
            total += np.conj(g.couplings[v]) * vals[0]
        if variant == "shared":
            worst = max(worst, abs(self.energy * vac[0] - total))
        return worst


def _gram(E: float, l: float) -> np.ndarray:
    """Gram matrix of the edge basis (C, S) on [0, l]."""
    if E > 0:
        k = math.sqrt(E)
        s2 = math.sin(2 * k * l) / (4 * k)
        cc = l / 2 + s2
        ss = (l / 2 - s2) / k**2
        cs = math.sin(k * l) ** 2 / (2 * k**2)
        return np.array([[cc, cs], [cs, ss]])
    kap = math.sqrt(-E)
    d = -math.expm1(-2 * kap * l) / (2 * kap)
    x = l * math.exp(-kap * l)
    return np.array([[d, x], [x, d]])


def graph_eigenstate(graph: MetricGraph, E: float, variant: str = "shared",
                     which: int = 0) -> GraphState01:
    """Normalised null vector of the secular matrix at an eigenvalue.

    For degenerate levels ``which`` selects one of the right singular
    vectors spanning the nullspace; a DegenerateEigenvalue warning
    reports the dimension.
    """
    M = secular_system(graph, E, variant).matrix
    A, _, col = _equilibrate(M)
    _, s, vh = np.linalg.svd(A)
    dim = int(np.sum(s <= 1e-10 * s[0]))
    if dim == 0:
        raise ValueError(f"E={E} is not an eigenvalue (sigma ratio {s[-1] / s[0]:.2e})")
    if dim > 1:
        warnings.warn(f"eigenvalue {E} is {dim}-fold degenerate", DegenerateEigenvalue,
                      stacklevel=2)
    v = np.conj(vh[-1 - which]) * col
    ne = graph.num_edges
    norm2 = 0.0
    for i, (_, _, l) in enumerate(graph.edges):
        c = v[2 * i: 2 * i + 2]
        norm2 += float(np.real(np.conj(c) @ _gram(E, l) @ c))
    norm2 += float(np.sum(np.abs(v[2 * ne:]) ** 2))
    v = v / math.sqrt(norm2)
    # fix the global phase: largest vacuum component real negative when
    # present (matches the one-source convention for c > 0)
    vac = v[2 * ne:]
    ref = vac[np.argmax(np.abs(vac))] if np.max(np.abs(vac)) > 1e-12 else v[np.argmax(np.abs(v))]
    v = v * (-abs(ref) / ref)
    coeffs = tuple((complex(v[2 * i]), complex(v[2 * i + 1])) for i in range(ne))
    vac = v[2 * ne:]
    phi0 = complex(vac[0]) if variant == "shared" else tuple(complex(a) for a in vac)
    return GraphState01(graph, E, phi0, coeffs)


# ---------------------------------------------------------------------------
# standard graphs
# ---------------------------------------------------------------------------

def interval_graph(l1: float, l2: float, c) -> MetricGraph:
    """Box [-l1, l2] with the source at 0: Dirichlet ends 0 and 2, source 1."""
    return build_graph([(0, 1, l1), (1, 2, l2)], [0, c, 0],
                       {0: "dirichlet", 2: "dirichlet"})


def pseudo_line(c, half_length: float) -> MetricGraph:
    """A valency-two source between two long edges with Dirichlet ends."""
    return interval_graph(half_length, half_length, c)


def star_graph(lengths, c_center, leaves: str = "dirichlet") -> MetricGraph:
    n = len(lengths)
    edges = [(0, i + 1, l) for i, l in enumerate(lengths)]
    bnd = {i + 1: leaves for i in range(n)} if leaves != "ibc" else {}
    return build_graph(edges, [c_center] + [0] * n, bnd)
