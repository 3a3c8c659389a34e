"""Time the numba-compiled hot kernels against the pure-numpy fallback.

Run from the repository root:

    python3 benchmarks/bench_backends.py [--sizes 100 500 2000] [--repeat 50]

Requires the numba backend to be importable (do not set POVINDEX_BACKEND=numpy
for this script; it reaches both implementations explicitly).
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from povindex._kernels import IMPLEMENTATIONS


def bench(fn, *args, repeat: int, warmup: bool = True) -> float:
    if warmup:
        fn(*args)
    start = time.perf_counter()
    for _ in range(repeat):
        fn(*args)
    return (time.perf_counter() - start) / repeat


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", type=int, nargs="+", default=[100, 500, 2000])
    parser.add_argument("--repeat", type=int, default=50)
    args = parser.parse_args()

    if "numba" not in IMPLEMENTATIONS:
        raise SystemExit("numba backend unavailable (POVINDEX_BACKEND=numpy set, or numba missing)")

    nb = IMPLEMENTATIONS["numba"]
    np_ = IMPLEMENTATIONS["numpy"]
    rng = np.random.default_rng(0)
    z = 1.41

    print(f"{'kernel':<22}{'n':>6}{'numpy':>12}{'numba':>12}{'speedup':>9}")
    for n in args.sizes:
        x = rng.exponential(0.5, size=n)
        g = rng.normal(0.05, 1.0, size=n)
        while not (g.min() < 0 < g.max()):
            g = rng.normal(0.05, 1.0, size=n)
        u = rng.random(n)

        cases = [
            ("el_solve", (g,)),
            ("sen_pair_stats", (x, z)),
            ("sst_pair_mean", (x, z)),
            ("sen_row_sums_pairs", (x, z)),
            ("ndtri_array", (u,)),
        ]
        for name, call_args in cases:
            # O(n^2) numpy oracles get memory-heavy past a few thousand points
            repeat = args.repeat if n <= 2000 or "pair" not in name else max(3, args.repeat // 10)
            t_np = bench(np_[name], *call_args, repeat=repeat)
            t_nb = bench(nb[name], *call_args, repeat=repeat)
            print(f"{name:<22}{n:>6}{t_np * 1e6:>10.1f}us{t_nb * 1e6:>10.1f}us{t_np / t_nb:>8.1f}x")
        print()


if __name__ == "__main__":
    main()
