#!/usr/bin/env python3
"""Grid-refinement study for kernel recovery from cone profiles.

For h(t) = |t|^q the profile is c(s) = c_{q,n} s^q; recovery inverts the
smoothing and the table below shows how the worst interior error falls
as the profile grid step halves.  Integer q sits at the roundoff floor
from the start (the finite-difference stencils are exact on
polynomials), fractional q converges at the stencil order.

Usage: python scripts/recovery_convergence.py [--n 2] [--qs 1,1.5,2]
"""

import argparse
import sys

import numpy as np

from plval import polytope as pt
from plval.valuation import PowerKernel, c_profile, recover_kernel


def worst_error(q: float, n: int, step: float) -> float:
    grid = np.arange(0.0, 2.0 + 0.5 * step, step)
    prof = c_profile(PowerKernel(1.0, q), pt.cube(n), grid)
    kern = recover_kernel(prof, n)
    keep = kern.ts > 1e-9
    rel = np.abs(kern.hs - kern.ts**q)[keep] / kern.ts[keep] ** q
    return float(np.max(rel))


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=2)
    ap.add_argument("--qs", default="1,1.5,2")
    ap.add_argument("--steps", default="0.04,0.02,0.01,0.005")
    args = ap.parse_args()

    qs = [float(x) for x in args.qs.split(",")]
    steps = [float(x) for x in args.steps.split(",")]

    print("step," + ",".join("q=%g" % q for q in qs))
    rows = []
    for step in steps:
        errs = [worst_error(q, args.n, step) for q in qs]
        rows.append(errs)
        print("%g," % step + ",".join("%.3e" % e for e in errs))
    print()
    for j, q in enumerate(qs):
        seq = [rows[i][j] for i in range(len(steps))]
        ratios = [seq[i] / seq[i + 1] for i in range(len(seq) - 1)]
        print("q=%g halving ratios: %s" % (q, ", ".join("%.2f" % r for r in ratios)))
    return 0


if __name__ == "__main__":
    sys.exit(main())
