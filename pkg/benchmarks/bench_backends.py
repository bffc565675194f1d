"""Time the numba and pure-numpy kernels on the same trials and check they agree.

    python3 benchmarks/bench_backends.py [--trials 20000] [--repeat 3]

The numba timing excludes compilation (one warm-up call per kernel).
"""

import argparse
import time

import numpy as np

from tailsort import kernels

CASES = {
    "occupancy n=256": lambda m, be: kernels.occupancy_batch(256, 1, m, backend=be),
    "trie n=64": lambda m, be: kernels.trie_batch(64, 6, 6, 1, m, backend=be),
    "delta n=64": lambda m, be: {"d": kernels.delta_batch(64, 6, 1, m, backend=be)},
    "bucket b2 n=64": lambda m, be: kernels.bucket_batch(64, "b2", 1, m, backend=be),
    "bucket blogb n=64": lambda m, be: kernels.bucket_batch(64, "blogb", 1, m, backend=be),
    "quicksort n=64": lambda m, be: kernels.quicksort_batch(64, 6, 1, m, backend=be),
}


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=20_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    print(f"{'kernel':<20} {'numba s':>10} {'numpy s':>10} {'speedup':>8}  agree")
    all_agree = True
    for name, case in CASES.items():
        case(10, "numba")
        t_nb, a = best_of(lambda: case(args.trials, "numba"), args.repeat)
        t_np, b = best_of(lambda: case(args.trials, "numpy"), args.repeat)
        agree = all(np.array_equal(a[k], b[k]) for k in a)
        all_agree &= agree
        print(f"{name:<20} {t_nb:>10.4f} {t_np:>10.4f} {t_np / t_nb:>8.1f}  {agree}")
    return 0 if all_agree else 1


if __name__ == "__main__":
    raise SystemExit(main())
