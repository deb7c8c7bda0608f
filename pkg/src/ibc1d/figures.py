"""Data behind the three figures, as lists of row tuples."""
from __future__ import annotations

import bisect
from dataclasses import dataclass

import numpy as np

from .box import (BoxSpec, box_ground_energy, box_positive_levels,
                  large_box_energy, small_box_energy,
                  staircase_trace_formula)
from .multi_source import energy_curve
from .single_source import Coupling

FIGURE_IDS = ("two-source-energy", "box-ground-vs-position", "staircase")

COLUMNS = {
    "two-source-energy": ("R", "E", "E_linear"),
    "box-ground-vs-position": ("l1", "E_exact", "E_smallbox", "E_limit"),
    "staircase": ("E", "N_exact", "N_trace"),
}


@dataclass(frozen=True)
class TwoSourceConfig:
    c1: complex = 1.0
    c2: complex = 1.0
    r_max: float = 50.0
    n: int = 200


@dataclass(frozen=True)
class BoxGroundConfig:
    c: complex = 1.0
    lengths: tuple = (0.5, 1.0, 2.0, 10.0)
    n: int = 199


@dataclass(frozen=True)
class StaircaseConfig:
    l1: float = 0.5
    l2: float = 0.5
    c: complex = 20.0
    e_max: float = 1000.0
    n: int = 2000
    orbit_count: int = 2855


def two_source_rows(cfg: TwoSourceConfig = TwoSourceConfig()):
    return energy_curve(cfg.c1, cfg.c2, cfg.r_max, cfg.n)


def box_ground_rows(cfg: BoxGroundConfig = BoxGroundConfig()) -> dict:
    """{l: rows} with the source swept across the open box (0, l)."""
    out = {}
    frac = np.linspace(0, 1, cfg.n + 2)[1:-1]
    for l in cfg.lengths:
        rows = []
        for f in frac:
            spec = BoxSpec(l * f, l * (1 - f), Coupling(cfg.c))
            rows.append((spec.l1, box_ground_energy(spec), small_box_energy(spec),
                         large_box_energy(spec)))
        out[l] = rows
    return out


def staircase_rows(cfg: StaircaseConfig = StaircaseConfig()):
    """Exact staircase (bound state included) against the trace formula.

    The exact count is taken just above each grid energy from the list
    of levels, so it is a right-continuous step function.
    """
    spec = BoxSpec(cfg.l1, cfg.l2, Coupling(cfg.c))
    levels = box_positive_levels(spec, cfg.e_max * 1.01)
    # E = 0 itself is left out: the truncated orbit sum is not uniform there
    E = np.linspace(0, cfg.e_max, cfg.n + 1)[1:]
    n_trace = staircase_trace_formula(spec, E, cfg.orbit_count)
    return [(e, 1 + bisect.bisect_right(levels, e), nt) for e, nt in zip(E, n_trace)]


def midgap_deviation(spec: BoxSpec, e_max: float = 1000.0, orbit_count: int = 2855):
    """|N_trace - N_exact| at the midpoints between consecutive levels in
    (0, e_max]; returns (energies, deviations)."""
    levels = box_positive_levels(spec, e_max)
    mids = np.array([levels[0] / 2] + [(a + b) / 2 for a, b in zip(levels, levels[1:])])
    exact = 1 + np.arange(len(mids))  # bound state plus the levels below
    trace = np.atleast_1d(staircase_trace_formula(spec, mids, orbit_count))
    return mids, np.abs(trace - exact)
