#!/usr/bin/env python3
"""Locate the closed-orbit boundary offset for the first two left wells.

At real energy a particle started within the critical y-offset of a well
center orbits it forever; beyond, it runs off down the lattice.  Both
wells and both offset signs should agree on the critical value
(~0.5298 for zeta=0.1, M=3, E=0.8).
"""

import argparse

from ptwells import Side, SystemParams, WellIndex, closed_orbit_boundary


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--zeta", type=float, default=0.1)
    ap.add_argument("--M", type=int, default=3)
    ap.add_argument("--e", type=float, default=0.8)
    ap.add_argument("--width", type=float, default=1e-4)
    args = ap.parse_args()

    params = SystemParams(args.zeta, args.M)
    for n in (0, 1):
        for direction in (+1, -1):
            res = closed_orbit_boundary(
                WellIndex(Side.LEFT, n), args.e, params,
                direction=direction, width_tol=args.width,
            )
            print(
                f"left n={n} direction={direction:+d}: critical offset {res.offset:.6f} "
                f"(bracket [{res.closed_offset:.6f}, {res.open_offset:.6f}], "
                f"{res.n_probes} probes, worst drift {res.max_probe_drift:.1e})"
            )


if __name__ == "__main__":
    main()
