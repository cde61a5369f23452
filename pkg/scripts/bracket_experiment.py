#!/usr/bin/env python3
"""Certified connective-constant brackets for the built-in catalogue.

Enumerates SAWs and bridges for each (family, height) pair, prints the
certified bracket per family, and optionally writes a CSV row per family
for external plotting.

    python3 scripts/bracket_experiment.py --n 8 --csv brackets.csv
"""

import argparse
import csv
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from sawlab.bounds import bracket
from sawlab.families import parse_family
from sawlab.heights import default_height
from sawlab.tables import build_count_table

DEFAULT_FAMILIES = ["z1", "z2", "z3", "tree:3", "tree:4", "hex", "squareoct",
                    "heis", "zcyl:2:0,6"]


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--families", nargs="*", default=DEFAULT_FAMILIES)
    ap.add_argument("--n", type=int, default=8, help="max walk length")
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--csv", default="", help="write rows here")
    args = ap.parse_args()

    rows = []
    print(f"{'family':<12} {'n':>3} {'lower':>10} {'upper':>10} {'width':>8} {'secs':>6}")
    for spec in args.families:
        fam = parse_family(spec)
        hf = default_height(fam)
        t0 = time.time()
        table = build_count_table(fam, hf, args.n, jobs=args.jobs)
        rep = bracket(table)
        dt = time.time() - t0
        print(f"{spec:<12} {args.n:>3} {rep.certified_lower:>10.6f} "
              f"{rep.certified_upper:>10.6f} {rep.width:>8.4f} {dt:>6.1f}")
        rows.append({"family": spec, "n_max": args.n,
                     "certified_lower": rep.certified_lower,
                     "certified_upper": rep.certified_upper,
                     "width": rep.width, "seconds": round(dt, 3)})
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=list(rows[0]))
            writer.writeheader()
            writer.writerows(rows)
        print(f"wrote {args.csv}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
