"""Regenerate the class table of Fourier coefficients of F shipped in schottky4/data.

    python3 scripts/build_fourier_table.py --max-trace 12 --out src/schottky4/data/fourier_trace12.json

Takes about a minute for trace 12.
"""
import argparse
import json
import time

from schottky4.schottky import build_fourier_table


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-trace", type=int, default=12)
    ap.add_argument("--out", default=None)
    args = ap.parse_args()
    t0 = time.time()

    def progress(k, n, rep, c):
        print(f"{k:4d}/{n}  diag={rep.diagonal().tolist()}  c={c}  {time.time() - t0:6.1f}s", flush=True)

    table = build_fourier_table(args.max_trace, progress)
    text = json.dumps(table.to_json(), indent=1)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


if __name__ == "__main__":
    main()
