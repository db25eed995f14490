#!/usr/bin/env python3
"""Reproduce the tunneling-time table: tau vs E2 for zeta=0.1, M=3, E1=1.

Writes results/table_sweep.csv and prints the E2*tau products, which
should hover near 16 across the whole range.
"""

import argparse
import pathlib

from ptwells import SystemParams
from ptwells.cli import cmd_sweep_e2, write_sweep_csv

E2_VALUES = [
    0.3, 0.5, 0.8, 1.0, 1.2, 1.5, 1.7, 2.0, 2.2, 2.5, 2.7, 3.0, 3.2, 3.5,
    3.7, 4.0, 4.2, 4.5, 4.7, 5.0, 5.2, 5.5, 5.7, 6.0, 6.2, 6.5, 6.7,
]


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--zeta", type=float, default=0.1)
    ap.add_argument("--M", type=int, default=3)
    ap.add_argument("--e1", type=float, default=1.0)
    ap.add_argument("--out", default="results/table_sweep.csv")
    ap.add_argument("--workers", type=int, default=None)
    args = ap.parse_args()

    rows = cmd_sweep_e2(SystemParams(args.zeta, args.M), args.e1, E2_VALUES, workers=args.workers)
    out = pathlib.Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_sweep_csv(rows, str(out))

    print(f"{'E2':>5} {'tau':>9} {'E2*tau':>7}  wells")
    for r in rows:
        if r["error"]:
            print(f"{r['e2']:>5} failed: {r['error']}")
            continue
        print(
            f"{r['e2']:>5} {r['tau']:>9.4f} {r['e2'] * r['tau']:>7.3f}  "
            f"left {r['n_left']:+d} / right {r['n_right']:+d}"
        )
    print(f"\nwrote {out}")


if __name__ == "__main__":
    main()
