"""Run every study and write its TSV files into one directory.

    python3 scripts/run_all_experiments.py [OUTDIR] [--strict]
"""

import argparse
import sys
import time

from stratrad.cli import main

COMMANDS = ["grey", "prop2", "albedo", "signmap", "sensitivity", "prop1"]


def run(outdir: str, strict: bool) -> int:
    worst = 0
    for cmd in COMMANDS:
        t0 = time.perf_counter()
        print(f"== {cmd}", flush=True)
        argv = [cmd, "--outdir", outdir] + (["--strict"] if strict else [])
        rc = main(argv)
        print(f"== {cmd} exit {rc} ({time.perf_counter() - t0:.1f} s)", flush=True)
        worst = max(worst, rc)
    return worst


if __name__ == "__main__":
    p = argparse.ArgumentParser()
    p.add_argument("outdir", nargs="?", default="results")
    p.add_argument("--strict", action="store_true")
    a = p.parse_args()
    sys.exit(run(a.outdir, a.strict))
