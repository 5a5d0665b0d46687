#!/usr/bin/env python3
"""Benchmark the compiled kernels against the NumPy fallback.

Usage: python benchmarks/bench_kernels.py [--repeats N]

Covers the two hot loops selected for compilation: the log-space
symmetric-polynomial recurrence (chi tables) and the fixed-step RK4
complex propagator (network trajectories).
"""

import argparse
import time

import numpy as np

from coboson import _pykernels

try:
    from coboson import _ckernels
except ImportError:
    _ckernels = None


def best_of(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_esp(impl, modes, order, repeats):
    rng = np.random.default_rng(0)
    lam = rng.uniform(0.01, 1.0, size=modes)
    lam /= lam.sum()
    log_lam = np.log(lam)
    return best_of(lambda: impl.esp_log_table(log_lam, order), repeats)


def bench_rk4(impl, sites, steps, repeats):
    rng = np.random.default_rng(1)
    h = rng.normal(size=(sites, sites))
    h = (0.5 * (h + h.T)).astype(np.complex128)
    h -= 0.05j * np.diag(rng.uniform(0.0, 1.0, sites))
    psi = np.zeros(sites, dtype=np.complex128)
    psi[0] = 1.0
    return best_of(lambda: impl.rk4_evolve(h, psi, 0.005, steps, steps // 100),
                   repeats)


CASES = [
    ("esp_log_table  J=256   order=64", bench_esp, (256, 64)),
    ("esp_log_table  J=4096  order=128", bench_esp, (4096, 128)),
    ("rk4_evolve     M=2     steps=20000", bench_rk4, (2, 20000)),
    ("rk4_evolve     M=6     steps=20000", bench_rk4, (6, 20000)),
    ("rk4_evolve     M=24    steps=5000", bench_rk4, (24, 5000)),
]


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    impls = [("python", _pykernels)]
    if _ckernels is not None:
        impls.append(("compiled", _ckernels))
    else:
        print("note: compiled extension not installed; timing fallback only")

    header = f"{'case':40s}" + "".join(f"{name:>12s}" for name, _ in impls)
    if len(impls) == 2:
        header += f"{'speedup':>10s}"
    print(header)
    print("-" * len(header))
    for label, fn, params in CASES:
        times = [fn(impl, *params, args.repeats) for _, impl in impls]
        row = f"{label:40s}" + "".join(f"{t * 1e3:10.2f}ms" for t in times)
        if len(times) == 2:
            row += f"{times[0] / times[1]:9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
