"""Box ground-state energy as the source moves across the box.

    python3 scripts/fig2_box_ground.py [--c 1] [--lengths 0.5 1 2 10] [--out results]

One CSV per box length (columns l1, E_exact, E_smallbox, E_limit).
The summary compares the exact curve with both asymptotes at mid-box.
"""
import argparse
from pathlib import Path

from ibc1d.cli import _fmt, csv_text, write_atomic
from ibc1d.figures import COLUMNS, BoxGroundConfig, box_ground_rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--c", type=complex, default=1.0)
    ap.add_argument("--lengths", type=float, nargs="+", default=[0.5, 1.0, 2.0, 10.0])
    ap.add_argument("--n", type=int, default=199)
    ap.add_argument("--out", default="results")
    a = ap.parse_args()

    blocks = box_ground_rows(BoxGroundConfig(a.c, tuple(a.lengths), a.n))
    print(f"{'l':>6} {'E_exact(mid)':>16} {'E_smallbox':>16} {'E_limit':>12}")
    for l, rows in blocks.items():
        path = Path(a.out) / f"fig2_box_ground_l{_fmt(l)}.csv"
        write_atomic(path, csv_text(COLUMNS["box-ground-vs-position"], rows))
        _, ex, sm, lim = rows[len(rows) // 2]
        print(f"{l:6g} {ex:16.10f} {sm:16.10f} {lim:12.8f}")
    print(f"wrote {len(blocks)} files to {a.out}/")


if __name__ == "__main__":
    main()
