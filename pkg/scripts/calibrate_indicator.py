"""Schottky indicator on Jacobian points and on off-locus controls.

Writes tests/fixtures/indicator_calibration.json with every value and the
point set used, so the thresholds in the tests are traceable.
"""
import argparse
import json

import numpy as np

from schottky4 import hyperell, schottky, theta
from schottky4.cli import GENUS4_IM_SCALE

#: Pinched genus-4 curves: branch points c -+ w with w = delta (1 + 0.1 k).
JACOBIAN_CENTERS = ([0, 1, 2, 3, 4], [0, 1, 3, 6, 10], [0, 2, 3, 5, 8])
PINCH = 1e-6


def jacobian_curves():
    return [hyperell.validate_curve(
        hyperell.pinched_branch_points(c, [PINCH * (1 + 0.1 * k) for k in range(5)]))
        for c in JACOBIAN_CENTERS]


def sym_noise(rng, size=0.1):
    R = rng.normal(size=(4, 4)) * size
    return (R + R.T) / 2


def indicator(tau, tol):
    ev = schottky.evaluate_lattice(tau, tol)
    return abs(ev.value) / ev.scale


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--tol", type=float, default=1e-8)
    ap.add_argument("--out", default="tests/fixtures/indicator_calibration.json")
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    generic = [indicator(theta.random_point(4, rng, scale=GENUS4_IM_SCALE), args.tol) for _ in range(10)]

    rng = np.random.default_rng(args.seed + 1)
    near_diag = [indicator(theta.SiegelPoint(2j * np.eye(4) + sym_noise(rng)), 1e-6) for _ in range(10)]

    jac, controls = [], []
    rng = np.random.default_rng(args.seed + 2)
    for curve in jacobian_curves():
        tau = hyperell.jacobian_point(curve)
        jac.append({"branch": curve.branch.tolist(), "min_eig_im": tau.min_eig,
                    "indicator": indicator(tau, args.tol)})
        controls.append(indicator(theta.SiegelPoint(tau.mat + sym_noise(rng)), args.tol))

    out = {
        "tol": args.tol,
        "generic": {"seed": args.seed, "im_scale": GENUS4_IM_SCALE, "indicators": generic,
                    "min": min(generic)},
        "near_diagonal": {"seed": args.seed + 1, "base": "2i I4 + symmetric N(0, 0.1^2) real part",
                          "tol": 1e-6, "indicators": near_diag, "max": max(near_diag)},
        "jacobian": {"pinch": PINCH, "curves": jac, "max": max(j["indicator"] for j in jac)},
        "jacobian_controls": {"seed": args.seed + 2, "indicators": controls, "min": min(controls)},
    }
    print(json.dumps(out, indent=1))
    with open(args.out, "w") as fh:
        json.dump(out, fh, indent=1)
        fh.write("\n")


if __name__ == "__main__":
    main()
