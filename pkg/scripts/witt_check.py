"""Exhaustive check that E8+E8 and D16+ have equal representation numbers in genus <= 3.

With --genus4, also computes every genus-4 coefficient with diagonal <= 4
(about 8 minutes) and checks that all rank <= 3 coefficients vanish.
"""
import argparse
import time

from schottky4 import lattice, schottky


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--genus4", action="store_true")
    args = ap.parse_args()
    S1, S2 = lattice.gram_e8_e8(), lattice.gram_d16_plus()
    for g, md in ((1, 8), (2, 8), (3, 6)):
        t0 = time.time()
        table = lattice.count_table({"E8+E8": S1, "D16+": S2}, g, max_diag=md)
        bad = [row for row in table.rows("E8+E8", "D16+") if row[3] != 0]
        print(f"genus {g}, diag <= {md}: {len(table.targets)} targets in {len(table.reps)} classes, "
              f"{len(bad)} differences, {time.time() - t0:.1f}s")

    if args.genus4:
        t0 = time.time()
        co = schottky.schottky_coefficients(4)
        singular = [c for c, rk in zip(co.diffs, co.ranks) if rk <= 3]
        print(f"genus 4, diag <= 4: {len(co.targets)} targets, {len(co.nonzero())} nonzero c(T), "
              f"{sum(1 for c in singular if c)} nonzero among {len(singular)} rank <= 3, "
              f"{time.time() - t0:.1f}s")


if __name__ == "__main__":
    main()
