"""Compare the numba and pure-numpy backends.

    python benchmarks/bench_backends.py [--runs 100000] [--repeat 5]

Times the power-factor computation for growing L and one block-parallel
Monte-Carlo sweep per trajectory kind, and checks that both backends return
the same numbers.  The first numba call of each kernel is excluded (JIT).
"""
import argparse
import timeit

import numpy as np

from elitist_chain import onebit_level_chain, run_bitstring, run_chain
from elitist_chain._accel import HAS_NUMBA
from elitist_chain._kernels import power_factor_arrays


def random_kernel(L, rng):
    # distinct diagonal; half of each column's leaving mass spread over the states above
    d = np.linspace(0.05, 0.9, L)
    w = np.triu(rng.random((L, L)), 1)
    w /= np.maximum(w.sum(axis=0), 1e-12)
    return w * (0.5 * (1 - d)) + np.diag(d)


def best(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def bench_factors(repeat):
    rng = np.random.default_rng(0)
    # factors grow quickly as diagonal gaps shrink, so report the relative difference
    print(f"{'L':>5} {'numba [ms]':>12} {'numpy [ms]':>12} {'rel. diff':>12}")
    for L in (8, 32, 128, 256):
        r = random_kernel(L, rng)
        a = power_factor_arrays(r, "numba")
        b = power_factor_arrays(r, "numpy")
        diff = float(np.max(np.abs(a[2] - b[2])) / np.max(np.abs(a[2])))
        tn = best(lambda: power_factor_arrays(r, "numba"), repeat)
        tp = best(lambda: power_factor_arrays(r, "numpy"), repeat)
        print(f"{L:>5} {tn * 1e3:>12.3f} {tp * 1e3:>12.3f} {diff:>12.1e}")


def bench_simulation(runs, repeat):
    cases = {
        "onebit n=16": lambda be: run_bitstring("onemax", 16, horizon=100, runs=runs, backend=be),
        "bitwise n=16": lambda be: run_bitstring("onemax", 16, "bitwise", "1/16", horizon=100, runs=runs, backend=be),
        "chain n=16": lambda be: run_chain(onebit_level_chain("onemax", 16), horizon=100, runs=runs, backend=be),
    }
    print(f"\n{'case':<14} {'numba [s]':>10} {'numpy [s]':>10} {'identical':>10}")
    for name, fn in cases.items():
        same = np.array_equal(fn("numba").mean, fn("numpy").mean)
        tn = best(lambda: fn("numba"), repeat)
        tp = best(lambda: fn("numpy"), repeat)
        print(f"{name:<14} {tn:>10.3f} {tp:>10.3f} {str(same):>10}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--runs", type=int, default=100_000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if not HAS_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")
    bench_factors(args.repeat)
    bench_simulation(args.runs, args.repeat)


if __name__ == "__main__":
    main()
