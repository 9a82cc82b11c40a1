"""Measure the constant k in F_theta = k F_lattice and store it as a test fixture."""
import argparse
import json
from fractions import Fraction

import numpy as np

from schottky4 import schottky, theta
from schottky4.cli import GENUS4_IM_SCALE


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--points", type=int, default=10)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--tol", type=float, default=1e-8)
    ap.add_argument("--out", default="tests/fixtures/proportionality.json")
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    pts = [theta.random_point(4, rng, scale=GENUS4_IM_SCALE) for _ in range(args.points)]
    r = schottky.proportionality(pts, args.tol)
    guess = Fraction(r.constant.real).limit_denominator(1000)
    out = {"seed": args.seed, "points": args.points, "im_scale": GENUS4_IM_SCALE, "tol": args.tol,
           "constant": [r.constant.real, r.constant.imag], "max_rel_deviation": r.max_rel_deviation,
           "nearest_small_fraction": str(guess)}
    print(json.dumps(out, indent=1))
    with open(args.out, "w") as fh:
        json.dump(out, fh, indent=1)
        fh.write("\n")


if __name__ == "__main__":
    main()
