"""Time the numba kernels against the pure-numpy fallbacks.

Usage: python benchmarks/bench_kernels.py [--n 14] [--k 4] [--repeat 5]

Both backends run on the same random tables; results are checked for
agreement before timings are printed.
"""

import argparse
import time

import numpy as np

from primalcurv import kernels
from primalcurv._accel import HAVE_NUMBA


def monotone_table(n, seed):
    rng = np.random.default_rng(seed)
    w = rng.random(1 << n)
    w[0] = 0.0
    return kernels.subset_sum(w, n, backend="numpy")


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=14)
    ap.add_argument("--k", type=int, default=4)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    if not HAVE_NUMBA:
        print("numba not installed; only the numpy backend can be timed")
    n, k = args.n, args.k
    table = monotone_table(n, args.seed)
    weights = np.random.default_rng(args.seed + 1).random(1 << n)

    cases = {
        "gamma_sum": lambda b: kernels.gamma_sum(table, n, k, backend=b),
        "max_single_tpc": lambda b: kernels.max_single_tpc(table, n, k - 1, backend=b),
        "elemental": lambda b: kernels.elemental(table, n, backend=b),
        "best_subset": lambda b: kernels.best_subset(table, n, k, backend=b),
        "subset_sum": lambda b: kernels.subset_sum(weights, n, backend=b),
    }
    backends = ["numpy"] + (["numba"] if HAVE_NUMBA else [])

    print(f"n={n} k={k} table size={1 << n} repeat={args.repeat}")
    print(f"{'kernel':16s} " + " ".join(f"{b:>12s}" for b in backends) + "     speedup")
    for name, fn in cases.items():
        if HAVE_NUMBA:
            fn("numba")  # compile outside the timed region
        row, outs = [], []
        for b in backends:
            t, out = best_of(lambda: fn(b), args.repeat)
            row.append(t)
            outs.append(out)
        if len(outs) == 2 and not np.allclose(outs[0], outs[1], rtol=0, atol=1e-12):
            raise SystemExit(f"{name}: backends disagree ({outs[0]} vs {outs[1]})")
        speed = f"{row[0] / row[1]:10.1f}x" if len(row) == 2 else ""
        print(f"{name:16s} " + " ".join(f"{t * 1e3:10.2f}ms" for t in row) + f" {speed}")


if __name__ == "__main__":
    main()
