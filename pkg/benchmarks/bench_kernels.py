#!/usr/bin/env python3
"""Benchmark the numba-jitted kernels against the plain numpy fallback.

Runs itself twice in subprocesses (CUTAWAY_NUMBA=1 and =0) so each backend
is selected at import time, then prints a comparison table. JIT compile time
is excluded by a warmup call before timing.

    python3 benchmarks/bench_kernels.py [--repeats 3]
"""

import argparse
import json
import os
import subprocess
import sys
import time


def _make_svm_problem(seed=0, n=4000, dim=200, nnz=12):
    import numpy as np

    rng = np.random.default_rng(seed)
    data, indices, indptr = [], [], [0]
    for _ in range(n):
        cols = np.sort(rng.choice(dim, size=nnz, replace=False))
        indices.extend(cols.tolist())
        data.extend(rng.normal(size=nnz).tolist())
        indptr.append(len(indices))
    y = np.where(rng.random(n) < 0.3, 1.0, -1.0)
    cw = np.ones(n, dtype=np.float64)
    epochs = 20
    perm = np.empty((epochs, n), dtype=np.int64)
    for e in range(epochs):
        perm[e] = rng.permutation(n)
    return (np.array(data), np.array(indices, dtype=np.int64),
            np.array(indptr, dtype=np.int64), y, cw, perm, dim)


def _time(fn, repeats):
    fn()  # warmup; compiles on the jitted path
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def run_worker(repeats):
    import numpy as np

    from cutaway import accel

    data, indices, indptr, y, cw, perm, dim = _make_svm_problem()
    results = {"backend": "numba" if accel.NUMBA_ENABLED else "numpy"}

    results["fit_linear_svm"] = _time(
        lambda: accel.fit_linear_svm(data, indices, indptr, y, cw, perm,
                                     dim, 1.0, 1.0, 1.0),
        repeats)

    w = np.random.default_rng(1).normal(size=dim)
    big = np.tile(data, 40)
    big_idx = np.tile(indices, 40)
    big_ptr = np.arange(0, big.size + 1, 12, dtype=np.int64)
    results["csr_dot"] = _time(
        lambda: accel.csr_dot(big, big_idx, big_ptr, w, 0.1), repeats)

    rng = np.random.default_rng(2)
    trials, k = 20_000, 8
    dur = np.full(k, 3.0)
    u_a, u_b = rng.random((trials, k)), rng.random((trials, k))
    perm_a = np.empty((trials, k), dtype=np.int64)
    perm_b = np.empty((trials, k), dtype=np.int64)
    for tr in range(trials):
        perm_a[tr] = rng.permutation(k)
        perm_b[tr] = rng.permutation(k)
    free = 120.0 - 24.0
    results["mc_pair_jaccard"] = _time(
        lambda: accel.mc_pair_jaccard(dur, dur, u_a, u_b, perm_a, perm_b,
                                      free, free, 0.5, 240),
        repeats)

    print(json.dumps(results))


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=3)
    parser.add_argument("--worker", action="store_true", help=argparse.SUPPRESS)
    args = parser.parse_args()

    if args.worker:
        run_worker(args.repeats)
        return

    rows = {}
    for flag in ("1", "0"):
        env = dict(os.environ, CUTAWAY_NUMBA=flag)
        out = subprocess.run(
            [sys.executable, os.path.abspath(__file__),
             "--worker", "--repeats", str(args.repeats)],
            env=env, capture_output=True, text=True, check=True)
        rows[flag] = json.loads(out.stdout.strip().splitlines()[-1])

    jitted, plain = rows["1"], rows["0"]
    kernels = ("fit_linear_svm", "csr_dot", "mc_pair_jaccard")
    print(f"{'kernel':<18} {plain['backend']:>12} {jitted['backend']:>12} "
          f"{'speedup':>9}")
    for k in kernels:
        speed = plain[k] / jitted[k] if jitted[k] > 0 else float("inf")
        print(f"{k:<18} {plain[k] * 1e3:>10.1f}ms {jitted[k] * 1e3:>10.1f}ms "
              f"{speed:>8.1f}x")


if __name__ == "__main__":
    main()
