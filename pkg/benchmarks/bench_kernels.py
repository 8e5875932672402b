"""Times the compiled kernels against the numpy fallback.

Usage: python3 benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import time

import numpy as np

from streambank import _kernels_py

try:
    from streambank import _native
except ImportError:
    _native = None

GREEDY_CASES = [(2000, 16, 200), (8000, 32, 400), (20000, 64, 500)]
NN_CASES = [(2000, 500, 16), (5000, 2000, 32), (10000, 4000, 64)]


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()
    rng = np.random.default_rng(0)
    impls = [("python", _kernels_py)] + ([("native", _native)] if _native else [])
    if _native is None:
        print("note: compiled kernel not built; timing the fallback only")

    print(f"{'kernel':<18}{'case':<26}" + "".join(f"{n:>12}" for n, _ in impls) + f"{'speedup':>10}")
    for n, k, target in GREEDY_CASES:
        pts = np.ascontiguousarray(rng.standard_normal((n, k)))
        row, results = [], []
        for _, impl in impls:
            t, out = best_of(lambda impl=impl: impl.greedy_select(pts, target), args.repeat)
            row.append(t)
            results.append(out[0].tolist())
        assert all(r == results[0] for r in results), "implementations disagree"
        speed = f"{row[0] / row[-1]:.1f}x" if len(row) > 1 else "-"
        print(
            f"{'greedy_select':<18}{f'N={n} k={k} M={target}':<26}"
            + "".join(f"{t * 1e3:>10.1f}ms" for t in row)
            + f"{speed:>10}"
        )
    for nq, m, k in NN_CASES:
        queries = np.ascontiguousarray(rng.standard_normal((nq, k)))
        bank = np.ascontiguousarray(rng.standard_normal((m, k)))
        row, results = [], []
        for _, impl in impls:
            t, out = best_of(lambda impl=impl: impl.nearest_neighbors(queries, bank), args.repeat)
            row.append(t)
            results.append(out[1].tolist())
        assert all(r == results[0] for r in results), "implementations disagree"
        speed = f"{row[0] / row[-1]:.1f}x" if len(row) > 1 else "-"
        print(
            f"{'nearest_neighbors':<18}{f'q={nq} M={m} k={k}':<26}"
            + "".join(f"{t * 1e3:>10.1f}ms" for t in row)
            + f"{speed:>10}"
        )


if __name__ == "__main__":
    main()
