#!/usr/bin/env python3
"""Quotient convergence experiment: cylinders Z x Z_m against Z^2.

For each circumference m this reports the similarity radius K, the first
length where the count tables diverge, and the certified bracket midpoints,
showing the cylinder constants approaching the planar one as m grows.

    python3 scripts/cylinder_convergence.py --n 10 --ms 4 6 8 10 12
"""

import argparse
import csv
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from sawlab.bounds import bracket, locality_report
from sawlab.families import hypercubic
from sawlab.heights import default_height
from sawlab.quotient import cylinder
from sawlab.tables import build_count_table


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=10, help="max walk length")
    ap.add_argument("--ms", type=int, nargs="*", default=[4, 6, 8, 10])
    ap.add_argument("--cap", type=int, default=6, help="similarity search cap")
    ap.add_argument("--csv", default="")
    args = ap.parse_args()

    z2 = hypercubic(2)
    hz2 = default_height(z2)
    base = bracket(build_count_table(z2, hz2, args.n))
    print(f"Z^2 bracket at n={args.n}: "
          f"[{base.certified_lower:.6f}, {base.certified_upper:.6f}] "
          f"mid {base.midpoint:.6f}")
    print(f"{'m':>4} {'K':>3} {'diverge_n':>9} {'mid':>10} {'|gap|':>10}")
    rows = []
    for m in args.ms:
        cyl = cylinder(2, (0, m))
        rep = locality_report(z2, hz2, cyl, default_height(cyl), args.n, args.cap)
        gap = abs(rep.bracket_b.midpoint - base.midpoint)
        div = rep.sigma_divergence_n
        print(f"{m:>4} {rep.similarity.K:>3} {str(div):>9} "
              f"{rep.bracket_b.midpoint:>10.6f} {gap:>10.6f}")
        rows.append({"m": m, "K": rep.similarity.K, "diverge_n": div,
                     "midpoint": rep.bracket_b.midpoint, "gap": gap})
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=list(rows[0]))
            writer.writeheader()
            writer.writerows(rows)
        print(f"wrote {args.csv}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
