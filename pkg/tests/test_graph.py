import math
import warnings

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ibc1d.box import BoxSpec, box_ground_energy, box_positive_levels
from ibc1d.graph import (DegenerateEigenvalue, GraphError, build_graph, graph_eigenstate,
                         graph_spectrum, insert_vertex, interval_graph, nullity,
                         pseudo_line, star_graph)
from ibc1d.single_source import Coupling

TEST_GRAPH = build_graph([(0, 1, 1.0), (1, 2, 1.3), (0, 2, 0.8), (2, 3, 0.6)],
                         [1.0, 0.5 + 0.5j, 0.0, 0.7])


@pytest.mark.parametrize("edges,couplings,boundary,msg", [
    ([(0, 0, 1.0)], [0], None, "loop"),
    ([(0, 1, 1.0), (1, 0, 2.0)], [0, 0], None, "multiple"),
    ([(0, 2, 1.0)], [0, 0], None, "unknown vertex"),
    ([(0, 1, 0.0)], [0, 0], None, "non-positive"),
    ([(0, 1, -1.0)], [0, 0], None, "non-positive"),
    ([(0, 1, 1.0)], [0, 0, 0], None, "isolated"),
    ([], [], None, "no edges"),
    ([(0, 1, 1.0)], [1, 0], {0: "dirichlet"}, "zero coupling"),
    ([(0, 1, 1.0), (1, 2, 1.0)], [0, 0, 0], {1: "dirichlet"}, "valency 1"),
    ([(0, 1, 1.0)], [0, 0], {0: "neumann"}, "unknown boundary"),
])
def test_build_graph_rejects(edges, couplings, boundary, msg):
    with pytest.raises(GraphError, match=msg):
        build_graph(edges, couplings, boundary)


def test_graph_properties():
    g = TEST_GRAPH
    assert g.num_edges == 4 and g.l_max == 1.3
    assert list(g.valency) == [2, 2, 3, 1]
    assert g.length(2, 0) == 0.8
    assert np.allclose(g.adjacency, g.adjacency.T)


def _mp_interval_det(E, l1, l2, c):
    """Five unknowns (a1, b1, a2, b2, phi0), edge amplitudes a C + b S."""
    k = mp.sqrt(mp.mpc(E))
    C = lambda x: mp.cos(k * x)
    S = lambda x: mp.sin(k * x) / k
    dC = lambda x: -k * mp.sin(k * x)
    dS = lambda x: mp.cos(k * x)
    M = mp.matrix([
        [1, 0, 0, 0, 0],
        [0, 0, C(l2), S(l2), 0],
        [C(l1), S(l1), -1, 0, 0],
        [-dC(l1), -dS(l1), 0, 1, -c],
        [0, 0, -mp.conj(c), 0, E],
    ])
    return mp.re(mp.det(M))


@pytest.mark.parametrize("l1,l2,c", [(0.3, 0.8, 3.0), (0.5, 0.5, 1.0)])
def test_interval_against_mpmath_assembly(l1, l2, c):
    mp.mp.dps = 50
    try:
        got = graph_spectrum(interval_graph(l1, l2, c), E_max=150.0)
        assert got[0] < 0 and all(E > 0 for E in got[1:])
        for E in got:
            ref = mp.findroot(lambda e: _mp_interval_det(e, l1, l2, c), mp.mpf(E))
            assert abs(E - float(ref)) < 1e-9 * max(1, abs(E))
        # no root is missed: sign changes of the exact determinant on a grid
        grid = np.linspace(got[0] - 1, 150, 3000)
        vals = [float(_mp_interval_det(e, l1, l2, c)) for e in grid if abs(e) > 1e-9]
        assert np.count_nonzero(np.diff(np.sign(vals))) == len(got)
    finally:
        mp.mp.dps = 15


def test_triangle_kirchhoff():
    g = build_graph([(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)], [0, 0, 0],
                    {v: "kirchhoff" for v in range(3)})
    got = graph_spectrum(g, E_min=0.0, E_max=50.0, with_multiplicity=True)
    ref = sorted([(2 * math.pi * n / 3) ** 2 for n in range(1, 4)] * 2)
    assert len(got) == len(ref)
    assert max(abs(a - b) for a, b in zip(got, ref)) < 1e-9
    with pytest.warns(DegenerateEigenvalue):
        graph_eigenstate(g, got[0])


def test_star_variants_agree_with_one_source():
    g = star_graph([1.0, 1.5, 0.7], 2.0)
    shared = graph_spectrum(g, E_max=60.0, variant="shared")
    trapped = graph_spectrum(g, E_max=60.0, variant="trapped")
    assert len(shared) == len(trapped)
    assert max(abs(a - b) for a, b in zip(shared, trapped)) < 1e-9
    assert sum(E < 0 for E in shared) == 1


def test_pseudo_line_approaches_line():
    g = pseudo_line(1.0, 30.0)
    E = graph_spectrum(g, E_max=-1e-3)
    assert len(E) == 1 and abs(E[0] + Coupling(1.0).kappa ** 2) < 1e-6
    s = graph_eigenstate(g, E[0])
    assert abs(s.vacuum_weight - 2 / 3) < 1e-4
    assert abs(s.edge_weight - 1 / 3) < 1e-4


@pytest.mark.parametrize("c", [1.0, 20.0])
def test_interval_matches_box(c):
    spec = BoxSpec(0.3, 0.7, Coupling(c))
    ref = [box_ground_energy(spec)] + box_positive_levels(spec, 1e4)[:9]
    got = graph_spectrum(interval_graph(0.3, 0.7, c), E_max=ref[-1] + 1.0)[:10]
    assert max(abs(a - b) / max(1, abs(b)) for a, b in zip(got, ref)) < 1e-9


def test_weak_coupling_shift_is_quadratic():
    base = (math.pi / 1.0) ** 2
    shifts = []
    for c in (1e-2, 2e-2):
        lv = graph_spectrum(interval_graph(0.3, 0.7, c), E_min=1.0, E_max=12.0)
        shifts.append(abs(lv[0] - base))
    assert abs(shifts[1] / shifts[0] - 4) < 0.05


def test_eigenstate_residuals():
    for variant in ("shared", "trapped"):
        for E in graph_spectrum(TEST_GRAPH, E_max=30.0, variant=variant):
            s = graph_eigenstate(TEST_GRAPH, E, variant)
            assert s.residuals(variant) < 1e-8
            assert 0 <= s.vacuum_weight <= 1


def test_trapped_vacuum_lives_on_sources():
    E = graph_spectrum(TEST_GRAPH, E_max=5.0, variant="trapped")[0]
    s = graph_eigenstate(TEST_GRAPH, E, "trapped")
    assert len(s.phi0) == 4 and s.phi0[2] == 0


def test_relabelling_is_invariant():
    perm = [2, 0, 3, 1]
    edges = [(perm[j], perm[k], l) for j, k, l in TEST_GRAPH.edges]
    cs = [0j] * 4
    for v, c in enumerate(TEST_GRAPH.couplings):
        cs[perm[v]] = c
    a = graph_spectrum(TEST_GRAPH, E_max=30.0)
    b = graph_spectrum(build_graph(edges, cs), E_max=30.0)
    assert len(a) == len(b) and max(abs(x - y) for x, y in zip(a, b)) < 1e-9


def test_phi1_direction():
    E = graph_spectrum(TEST_GRAPH, E_max=30.0)[3]
    s = graph_eigenstate(TEST_GRAPH, E)
    j, k, l = TEST_GRAPH.edges[1]
    assert abs(s.phi1(1, 0.2, from_vertex=k) - s.phi1(1, l - 0.2)) < 1e-15
    with pytest.raises(ValueError):
        s.phi1(1, 0.2, from_vertex=3)


def test_zero_coupling_vertex_insertion():
    g = star_graph([1.0, 1.5, 0.7], 2.0)
    a = graph_spectrum(g, E_max=40.0)
    b = graph_spectrum(insert_vertex(g, 0, 2, 0.4, 0.0), E_max=40.0)
    assert max(abs(x - y) for x, y in zip(a, b)) < 1e-9
    with pytest.raises(GraphError):
        insert_vertex(g, 0, 2, 1.5, 1.0)


def test_nullity_and_bounds():
    E = graph_spectrum(TEST_GRAPH, E_max=30.0)[1]
    assert nullity(TEST_GRAPH, E) == 1
    with pytest.raises(ValueError):
        graph_spectrum(TEST_GRAPH, E_min=5.0, E_max=1.0)


@settings(max_examples=20, deadline=None)
@given(st.floats(0.1, 3), st.floats(0.1, 3), st.floats(0.2, 10))
def test_interval_ground_state(l1, l2, c):
    spec = BoxSpec(l1, l2, Coupling(c))
    Eg = box_ground_energy(spec)
    got = graph_spectrum(interval_graph(l1, l2, c), E_max=-1e-9)
    assert len(got) == 1 and abs(got[0] - Eg) < 1e-9 * max(1, abs(Eg))
