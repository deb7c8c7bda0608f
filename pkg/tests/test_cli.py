import csv
import io
import json
import math
import subprocess
import sys

import pytest

from ibc1d.cli import ConfigError, main, parse_graph_config
from ibc1d.multi_source import interaction_energy

TRIANGLE = """\
# equilateral triangle, Kirchhoff everywhere
vertex 10 0 0 kirchhoff
vertex 20 0 0 kirchhoff
vertex 30 0 0 kirchhoff
edge 10 20 1
edge 20 30 1
edge 10 30 1
"""


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_ground_line_json(capsys):
    code, out, _ = run(capsys, "ground", "--c", "1")
    assert code == 0
    r = json.loads(out)["result"]
    assert abs(r["energy"] + 2 ** (-2 / 3)) < 1e-15
    assert abs(r["weight_vacuum"] - 2 / 3) < 1e-12
    assert abs(r["weight_particle"] - 1 / 3) < 1e-12


def test_ground_complex_coupling_and_mass(capsys):
    code, out, _ = run(capsys, "ground", "--c", "0.6+0.8j", "--format", "csv")
    assert code == 0
    row = next(csv.DictReader(io.StringIO(out)))
    assert abs(float(row["energy"]) + 2 ** (-2 / 3)) < 1e-15
    code, out, _ = run(capsys, "ground", "--c", "1", "--mass", "1")
    r = json.loads(out)["result"]
    assert code == 0 and abs(r["kappa"] - 1.1914878839531187) < 1e-14
    assert abs(r["energy"] - (1 - r["kappa"] ** 2)) < 1e-14


def test_ground_zero_coupling(capsys):
    code, _, err = run(capsys, "ground", "--c", "0")
    assert code == 2 and "free vacuum" in err


def test_ground_other_targets(capsys, tmp_path):
    code, out, _ = run(capsys, "ground", "--target", "multi", "--positions", "1", "0",
                       "--couplings", "1", "1")
    assert code == 0
    assert abs(json.loads(out)["result"]["energy"] - interaction_energy(1, 1, 1.0)) < 1e-14
    code, _, err = run(capsys, "ground", "--target", "multi", "--positions", "0", "0",
                       "--couplings", "1", "1")
    assert code == 2 and "increasing" in err
    code, out, _ = run(capsys, "ground", "--target", "box", "--l1", "500", "--l2", "500")
    assert code == 0 and abs(json.loads(out)["result"]["kappa"] - 2 ** (-1 / 3)) < 1e-9
    code, _, _ = run(capsys, "ground", "--target", "box", "--l1", "1")
    assert code == 2
    cfg = tmp_path / "line.txt"
    cfg.write_text("vertex 0 0 0 dirichlet\nvertex 1 1 0\nvertex 2 0 0 dirichlet\n"
                   "edge 0 1 30\nedge 1 2 30\n")
    code, out, _ = run(capsys, "ground", "--target", "graph", "--config", str(cfg))
    r = json.loads(out)["result"]
    assert code == 0 and abs(r["energy"] + 2 ** (-2 / 3)) < 1e-6
    assert abs(r["weight_vacuum"] - 2 / 3) < 1e-4


def test_bad_arguments(capsys):
    assert run(capsys, "ground", "--c", "abc")[0] == 2
    assert run(capsys, "ground", "--mass", "-1")[0] == 2
    assert run(capsys, "bogus")[0] == 2
    assert run(capsys, "figure", "staircase", "--n", "1")[0] == 2


def test_figure_two_source_csv(capsys):
    code, out, _ = run(capsys, "figure", "two-source-energy", "--format", "csv", "--n", "20")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["R", "E", "E_linear"]
    assert len(rows) == 22  # header, R = 0, then n log-spaced points
    assert abs(float(rows[1][0])) < 1e-15
    assert abs(float(rows[1][1]) + 2 ** (2 / 3)) < 1e-12


def test_figure_box_files(capsys, tmp_path):
    out = tmp_path / "fig2.csv"
    code, _, _ = run(capsys, "figure", "box-ground-vs-position", "--format", "csv",
                     "--lengths", "1", "10", "--n", "21", "-o", str(out))
    assert code == 0
    with open(tmp_path / "fig2_l10.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert list(rows[0]) == ["l1", "E_exact", "E_smallbox", "E_limit"]
    mid = rows[10]
    assert abs(float(mid["l1"]) - 5) < 1e-12
    assert abs(float(mid["E_exact"]) - float(mid["E_limit"])) < 1e-3
    assert (tmp_path / "fig2_l1.csv").exists()


def test_figure_staircase_json(capsys):
    code, out, _ = run(capsys, "figure", "staircase", "--e-max", "200", "--n", "40",
                       "--orbits", "251")  # all orbits with L <= 6
    assert code == 0
    d = json.loads(out)
    assert d["columns"] == ["E", "N_exact", "N_trace"]
    rows = d["data"]["rows"]
    assert len(rows) == 40 and rows[0][0] > 0 and rows[-1][0] == 200
    assert all(r[1] >= 1 for r in rows)


def test_verify_exit_codes(capsys):
    code, out, _ = run(capsys, "verify", "flux")
    assert code == 0 and json.loads(out)["passed"]
    code, out, _ = run(capsys, "verify", "orthonormality", "--format", "csv")
    assert code == 0 and out.startswith("suite,check,residual,tolerance,passed")


def test_verify_reports_failure(capsys, monkeypatch):
    from ibc1d import suites
    monkeypatch.setattr(suites, "flux", lambda **kw: [suites.Check("forced", 1.0, 0.0)])
    code, out, _ = run(capsys, "verify", "flux")
    assert code == 1 and not json.loads(out)["passed"]


def test_graph_triangle(capsys, tmp_path):
    cfg = tmp_path / "tri.txt"
    cfg.write_text(TRIANGLE)
    code, out, _ = run(capsys, "graph", str(cfg), "--e-max", "10", "--states")
    assert code == 0
    d = json.loads(out)
    assert d["vertex_ids"] == [10, 20, 30]
    ref = (2 * math.pi / 3) ** 2
    assert len(d["eigenvalues"]) == 2
    assert all(abs(E - ref) < 1e-9 for E in d["eigenvalues"])
    assert all(s["residual"] < 1e-8 for s in d["states"])


@pytest.mark.parametrize("text,lineno", [
    ("vertex 0 0 0\nvertex 1 0\n", 2),
    ("vertex 0 0 0\nedge 0 5 1\n", 2),
    ("vertex 0 1 0\nvertex 1 0 0\n\nfoo 1 2\n", 4),
    ("vertex 0 x 0\n", 1),
    ("vertex 0 0 0 neumann\n", 1),
])
def test_graph_config_errors_name_the_line(capsys, tmp_path, text, lineno):
    cfg = tmp_path / "bad.txt"
    cfg.write_text(text)
    code, _, err = run(capsys, "graph", str(cfg))
    assert code == 2
    assert f"bad.txt:{lineno}" in err


def test_graph_config_structural_errors():
    with pytest.raises(ConfigError, match="no vertices"):
        parse_graph_config("# nothing\n")
    with pytest.raises(ConfigError, match="isolated"):
        parse_graph_config("vertex 0 0 0\nvertex 1 0 0\nvertex 2 1 0\nedge 0 1 1\n")


def test_missing_config_file(capsys, tmp_path):
    assert run(capsys, "graph", str(tmp_path / "none.txt"))[0] == 2


def test_outputs_are_idempotent(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        assert run(capsys, "figure", "two-source-energy", "--n", "30", "-o", str(path))[0] == 0
    assert a.read_bytes() == b.read_bytes()
    code, out1, _ = run(capsys, "ground", "--c", "0.3-1.7j", "--format", "csv")
    code, out2, _ = run(capsys, "ground", "--c", "0.3-1.7j", "--format", "csv")
    assert out1 == out2


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "ibc1d", "ground", "--c", "1", "--format", "csv"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and "energy" in r.stdout
