"""Command-line interface: ground states, figure data, verification
suites and graph spectra as CSV or JSON.

Exit status: 0 success, 1 numerical failure (or failed verification),
2 invalid input.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import figures, suites
from .box import BoxSpec, box_ground_energy
from .graph import (DegenerateEigenvalue, GraphError, build_graph, graph_eigenstate,
                    graph_spectrum)
from .multi_source import NoBoundStateError, SourceArray, ground_state_multi
from .numerics import IntegrationError, RootFindingError
from .single_source import Coupling, ZeroCouplingError, ground_state, ground_state_massive

UNITS = "hbar = 2m = 1; energies in units of hbar^2/(2m) per length^2"
EXIT_OK, EXIT_NUMERIC, EXIT_INPUT = 0, 1, 2


class InputError(ValueError):
    pass


@dataclass
class RunConfig:
    subcommand: str
    params: dict = field(default_factory=dict)
    output: str | None = None
    fmt: str = "json"


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

def _num(v):
    if isinstance(v, (complex, np.complexfloating)):
        return {"re": float(v.real), "im": float(v.imag)}
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    return v


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return _num(obj)


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "%.17g" % v
    if isinstance(v, (complex, np.complexfloating)):
        return "%.17g%+.17gj" % (v.real, v.imag)
    return str(v)


def csv_text(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


def json_text(payload: dict) -> str:
    return json.dumps(_jsonable({"units": UNITS, **payload}), indent=2) + "\n"


def write_atomic(path, text: str):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".")
    with os.fdopen(fd, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def emit(text: str, output):
    if output:
        write_atomic(output, text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# ground
# ---------------------------------------------------------------------------

def _coupling_arg(s: str) -> complex:
    try:
        c = complex(s.replace(" ", ""))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {s!r}")
    if not (math.isfinite(c.real) and math.isfinite(c.imag)):
        raise argparse.ArgumentTypeError(f"non-finite coupling {s!r}")
    return c


def cmd_ground(cfg: RunConfig) -> int:
    p = cfg.params
    target = p["target"]
    if target == "line":
        c = Coupling(p["c"])
        if p.get("mass"):
            g = ground_state_massive(c, p["mass"])
        else:
            g = ground_state(c)
        w0, w1 = g.weights
        row = {"target": "line", "c": c.c, "mass": p.get("mass") or 0.0,
               "kappa": g.kappa, "energy": g.energy,
               "weight_vacuum": w0, "weight_particle": w1,
               "normalization_residual": abs(w0 + w1 - 1)}
    elif target == "multi":
        pos, cs = p.get("positions"), p.get("couplings")
        if not pos or not cs or len(pos) != len(cs):
            raise InputError("--positions and --couplings must have equal, non-zero length")
        g = ground_state_multi(SourceArray.unsorted(pos, cs))
        w0 = abs(g.phi0) ** 2
        row = {"target": "multi", "kappa": g.kappa, "energy": g.energy,
               "weight_vacuum": w0, "weight_particle": 1 - w0}
    elif target == "box":
        if p.get("l1") is None or p.get("l2") is None:
            raise InputError("box target needs --l1 and --l2")
        spec = BoxSpec(p["l1"], p["l2"], Coupling(p["c"]))
        spec.coupling.require_nonzero()
        E = box_ground_energy(spec)
        row = {"target": "box", "c": spec.coupling.c, "l1": spec.l1, "l2": spec.l2,
               "kappa": math.sqrt(-E), "energy": E}
    elif target == "graph":
        if not p.get("config"):
            raise InputError("graph target needs --config")
        graph, _ = parse_graph_config(Path(p["config"]).read_text(), p["config"])
        levels = graph_spectrum(graph, E_max=-1e-12, variant=p["variant"])
        if not levels:
            raise NoBoundStateError("no negative-energy level on this graph")
        st = graph_eigenstate(graph, levels[0], p["variant"])
        w0 = st.vacuum_weight
        row = {"target": "graph", "variant": p["variant"], "kappa": math.sqrt(-levels[0]),
               "energy": levels[0], "weight_vacuum": w0, "weight_particle": 1 - w0}
    else:  # pragma: no cover - argparse restricts choices
        raise InputError(f"unknown target {target}")
    if cfg.fmt == "csv":
        emit(csv_text(list(row), [list(row.values())]), cfg.output)
    else:
        emit(json_text({"command": "ground", "result": row,
                        "tolerance": {"root": 1e-15}}), cfg.output)
    return EXIT_OK


# ---------------------------------------------------------------------------
# figure
# ---------------------------------------------------------------------------

def cmd_figure(cfg: RunConfig) -> int:
    p = cfg.params
    which = p["which"]
    cols = figures.COLUMNS[which]
    if which == "two-source-energy":
        fc = figures.TwoSourceConfig(p["c1"], p["c2"], p["r_max"], p["n"])
        rows = figures.two_source_rows(fc)
        meta = {"c1": fc.c1, "c2": fc.c2}
        blocks = {None: rows}
    elif which == "box-ground-vs-position":
        fc = figures.BoxGroundConfig(p["c"], tuple(p["lengths"]), p["n"])
        blocks = figures.box_ground_rows(fc)
        meta = {"c": fc.c, "lengths": list(fc.lengths)}
    else:
        fc = figures.StaircaseConfig(p["l1"], p["l2"], p["c"], p["e_max"], p["n"],
                                     p["orbits"])
        rows = figures.staircase_rows(fc)
        meta = {"l1": fc.l1, "l2": fc.l2, "c": fc.c, "orbit_count": fc.orbit_count,
                "note": "N_exact counts the bound state"}
        blocks = {None: rows}
    if cfg.fmt == "json":
        data = {("rows" if k is None else f"l={_fmt(k)}"): [list(r) for r in v]
                for k, v in blocks.items()}
        emit(json_text({"command": "figure", "figure": which, "columns": list(cols),
                        "parameters": meta, "data": data}), cfg.output)
        return EXIT_OK
    if None in blocks:
        emit(csv_text(cols, blocks[None]), cfg.output)
        return EXIT_OK
    # one table per box length
    if cfg.output:
        out = Path(cfg.output)
        for l, rows in blocks.items():
            write_atomic(out.with_name(f"{out.stem}_l{_fmt(l)}{out.suffix or '.csv'}"),
                         csv_text(cols, rows))
    else:
        for l, rows in blocks.items():
            sys.stdout.write(f"# l={_fmt(l)}\n" + csv_text(cols, rows))
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def cmd_verify(cfg: RunConfig) -> int:
    p = cfg.params
    names = suites.SUITES if p["suite"] == "all" else (p["suite"],)
    report = {}
    for name in names:
        kw = {}
        if name in ("orthonormality", "completeness", "flux"):
            kw["c"] = p["c"]
        if name == "oracle":
            kw["target"] = p["target"]
        report[name] = [ch.as_dict() for ch in suites.run(name, **kw)]
    ok = all(ch["passed"] for checks in report.values() for ch in checks)
    if cfg.fmt == "csv":
        rows = [(s, ch["name"], ch["residual"], ch["tolerance"], ch["passed"])
                for s, checks in report.items() for ch in checks]
        emit(csv_text(("suite", "check", "residual", "tolerance", "passed"), rows), cfg.output)
    else:
        emit(json_text({"command": "verify", "passed": ok, "suites": report}), cfg.output)
    return EXIT_OK if ok else EXIT_NUMERIC


# ---------------------------------------------------------------------------
# graph
# ---------------------------------------------------------------------------

class ConfigError(InputError):
    pass


def parse_graph_config(text: str, name: str = "<config>"):
    """Parse the line format

        vertex <id> <c_re> <c_im> [dirichlet|kirchhoff]
        edge <j> <k> <length>

    ('#' starts a comment). Vertex ids are arbitrary integers, mapped to
    0..n-1 in order of appearance. Returns (graph, id list).
    """
    ids, cs, bnd, edges = [], [], {}, []
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        where = f"{name}:{no}"
        try:
            if tok[0] == "vertex":
                if len(tok) not in (4, 5):
                    raise ConfigError("expected 'vertex <id> <c_re> <c_im> [dirichlet|kirchhoff]'")
                vid = int(tok[1])
                if vid in ids:
                    raise ConfigError(f"duplicate vertex {vid}")
                c = complex(float(tok[2]), float(tok[3]))
                if len(tok) == 5:
                    if tok[4] not in ("dirichlet", "kirchhoff"):
                        raise ConfigError(f"unknown vertex condition {tok[4]!r}")
                    bnd[len(ids)] = tok[4]
                ids.append(vid)
                cs.append(c)
            elif tok[0] == "edge":
                if len(tok) != 4:
                    raise ConfigError("expected 'edge <j> <k> <length>'")
                j, k = int(tok[1]), int(tok[2])
                l = float(tok[3])
                for v in (j, k):
                    if v not in ids:
                        raise ConfigError(f"edge refers to undeclared vertex {v}")
                edges.append((ids.index(j), ids.index(k), l))
            else:
                raise ConfigError(f"unknown keyword {tok[0]!r}")
        except ConfigError as e:
            raise ConfigError(f"{where}: {e}") from None
        except ValueError as e:
            raise ConfigError(f"{where}: {e}") from None
    if not ids:
        raise ConfigError(f"{name}: no vertices declared")
    try:
        return build_graph(edges, cs, bnd), ids
    except GraphError as e:
        raise ConfigError(f"{name}: {e}") from None


def cmd_graph(cfg: RunConfig) -> int:
    p = cfg.params
    try:
        text = Path(p["config"]).read_text()
    except OSError as e:
        raise InputError(f"cannot read {p['config']}: {e.strerror}")
    graph, ids = parse_graph_config(text, p["config"])
    variant = p["variant"]
    levels = graph_spectrum(graph, E_min=p["e_min"], E_max=p["e_max"], variant=variant,
                            with_multiplicity=True)
    if cfg.fmt == "csv":
        emit(csv_text(("index", "E", "variant"),
                      [(i, E, variant) for i, E in enumerate(levels)]), cfg.output)
        return EXIT_OK
    payload = {"command": "graph", "variant": variant, "vertex_ids": ids,
               "eigenvalues": levels,
               "tolerance": {"root": "bisection to round-off in k"}}
    if p["states"]:
        states, seen = [], {}
        for E in levels:
            which = seen.get(E, 0)
            seen[E] = which + 1
            with warnings.catch_warnings():
                # every vector of a degenerate level is listed explicitly
                warnings.simplefilter("ignore", DegenerateEigenvalue)
                st = graph_eigenstate(graph, E, variant, which=which)
            res = st.residuals(variant)
            states.append({"E": E, "phi0": st.phi0,
                           "edges": [{"j": ids[j], "k": ids[k], "length": l,
                                      "alpha": a, "beta": b}
                                     for (j, k, l), (a, b) in zip(graph.edges,
                                                                  st.edge_coefficients)],
                           "residual": res})
        payload["states"] = states
    emit(json_text(payload), cfg.output)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ibc1d", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="subcommand", required=True)

    def common(p):
        p.add_argument("--format", choices=("json", "csv"), default="json", dest="fmt")
        p.add_argument("--output", "-o", default=None, help="file (default stdout)")

    g = sub.add_parser("ground", help="ground state energy and sector weights")
    g.add_argument("--target", choices=("line", "multi", "box", "graph"), default="line")
    g.add_argument("--c", type=_coupling_arg, default=1.0, help="coupling, e.g. 1 or 0.5+1j")
    g.add_argument("--mass", type=float, default=None)
    g.add_argument("--positions", type=float, nargs="+")
    g.add_argument("--couplings", type=_coupling_arg, nargs="+")
    g.add_argument("--l1", type=float)
    g.add_argument("--l2", type=float)
    g.add_argument("--config")
    g.add_argument("--variant", choices=("shared", "trapped"), default="shared")
    common(g)

    f = sub.add_parser("figure", help="data behind the figures")
    f.add_argument("which", choices=figures.FIGURE_IDS)
    f.add_argument("--c1", type=_coupling_arg, default=1.0)
    f.add_argument("--c2", type=_coupling_arg, default=1.0)
    f.add_argument("--r-max", type=float, default=50.0)
    f.add_argument("--c", type=_coupling_arg, default=None,
                   help="coupling (default 1 for the box sweep, 20 for the staircase)")
    f.add_argument("--lengths", type=float, nargs="+", default=[0.5, 1.0, 2.0, 10.0])
    f.add_argument("--l1", type=float, default=0.5)
    f.add_argument("--l2", type=float, default=0.5)
    f.add_argument("--e-max", type=float, default=1000.0)
    f.add_argument("--orbits", type=int, default=2855)
    f.add_argument("--n", type=int, default=None, help="number of grid points")
    common(f)

    v = sub.add_parser("verify", help="run verification suites")
    v.add_argument("suite", choices=suites.SUITES + ("all",))
    v.add_argument("--c", type=_coupling_arg, default=1.0)
    v.add_argument("--target", choices=suites.ORACLE_TARGETS, default="line")
    common(v)

    gr = sub.add_parser("graph", help="spectrum of a metric graph")
    gr.add_argument("config")
    gr.add_argument("--variant", choices=("shared", "trapped"), default="shared")
    gr.add_argument("--e-min", type=float, default=None)
    gr.add_argument("--e-max", type=float, default=100.0)
    gr.add_argument("--states", action="store_true", help="include eigenstates (JSON)")
    common(gr)
    return ap


def _validate(args) -> RunConfig:
    p = dict(vars(args))
    sub = p.pop("subcommand")
    out, fmt = p.pop("output"), p.pop("fmt")
    if sub == "ground" and p["mass"] is not None and not p["mass"] > 0:
        raise InputError("--mass must be positive")
    if sub == "figure":
        defaults = {"two-source-energy": 200, "box-ground-vs-position": 199,
                    "staircase": 2000}
        p["n"] = p["n"] if p["n"] is not None else defaults[p["which"]]
        if p["c"] is None:
            p["c"] = 20.0 if p["which"] == "staircase" else 1.0
        if p["n"] < 2:
            raise InputError("--n must be at least 2")
        if p["which"] == "two-source-energy" and not p["r_max"] > 1e-3:
            raise InputError("--r-max must exceed 1e-3")
        if p["which"] == "box-ground-vs-position" and not all(l > 0 for l in p["lengths"]):
            raise InputError("box lengths must be positive")
        if p["which"] == "staircase":
            if not (p["l1"] > 0 and p["l2"] > 0 and p["e_max"] > 0 and p["orbits"] >= 0):
                raise InputError("staircase needs l1, l2, e-max > 0 and orbits >= 0")
    if sub == "graph" and p["e_min"] is not None and not p["e_min"] < p["e_max"]:
        raise InputError("--e-min must be below --e-max")
    return RunConfig(sub, p, out, fmt)


COMMANDS = {"ground": cmd_ground, "figure": cmd_figure, "verify": cmd_verify,
            "graph": cmd_graph}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code else EXIT_OK
    try:
        cfg = _validate(args)
        return COMMANDS[cfg.subcommand](cfg)
    except ZeroCouplingError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except (NoBoundStateError, RootFindingError, IntegrationError,
            np.linalg.LinAlgError, ArithmeticError) as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except (InputError, GraphError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
