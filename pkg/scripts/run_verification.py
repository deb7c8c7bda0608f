"""Run every verification suite and the acceptance criteria, print a
table and write results/verification.json. Exit status 1 if anything
fails.

    python3 scripts/run_verification.py [--skip-acceptance] [--out results]
"""
import argparse
import importlib.util
import json
import sys
from pathlib import Path

from ibc1d import suites
from ibc1d.cli import json_text, write_atomic

ROOT = Path(__file__).resolve().parents[1]


def load_acceptance():
    spec = importlib.util.spec_from_file_location("acceptance", ROOT / "tests" / "test_acceptance.py")
    mod = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(mod)
    return mod


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--skip-acceptance", action="store_true")
    ap.add_argument("--out", default="results")
    a = ap.parse_args()

    report, ok = {}, True
    runs = [(s, {}) for s in suites.SUITES if s != "oracle"]
    runs += [("oracle", {"target": t}) for t in suites.ORACLE_TARGETS]
    for name, kw in runs:
        key = name if not kw else f"{name}:{kw['target']}"
        checks = suites.run(name, **kw)
        report[key] = [ch.as_dict() for ch in checks]
        for ch in checks:
            ok &= ch.passed
            print(f"{'ok  ' if ch.passed else 'FAIL'} {key:16s} {ch.name:58s} "
                  f"{ch.residual:9.2e} <= {ch.tolerance:.0e}")
    if not a.skip_acceptance:
        acc = load_acceptance()
        report["acceptance"] = []
        for crit in acc.CRITERIA:
            passed, line = acc.evaluate(*crit)
            ok &= passed
            report["acceptance"].append({"criterion": crit[0], "passed": passed, "line": line})
            print(line)
    path = Path(a.out) / "verification.json"
    write_atomic(path, json_text({"passed": ok, "suites": report}))
    print(f"{'all checks passed' if ok else 'FAILURES'}; report in {path}")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
