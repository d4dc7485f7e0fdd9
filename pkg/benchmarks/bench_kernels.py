"""Benchmark the numba kernels against the pure-numpy reference path.

Run:  python3 benchmarks/bench_kernels.py [--repeats N]

Covers the hot paths: Gaussian stream generation, mode contraction (the
power-iteration inner step), pairwise-free contraction (block-matrix
assembly) and full power-iteration runs.  The active package backend is
whatever `spikedtensor.kernels.BACKEND` resolved to; both paths are timed
here explicitly regardless.
"""

import argparse
import time

import numpy as np

from spikedtensor.kernels import reference as ref

try:
    from spikedtensor.kernels import jit
except ImportError:
    jit = None


def _time(fn, repeats):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def _row(name, numpy_s, numba_s):
    if numba_s is None:
        print(f"{name:<38} {numpy_s * 1e3:>10.2f} ms {'-':>12}")
    else:
        print(f"{name:<38} {numpy_s * 1e3:>10.2f} ms {numba_s * 1e3:>9.2f} ms "
              f"{numpy_s / numba_s:>7.2f}x")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()

    print(f"{'kernel':<38} {'numpy':>13} {'numba':>12} {'speedup':>8}")

    cases = [("normal_stream 1e6", 1_000_000), ("normal_stream 2.7e7", 27_000_000)]
    for name, count in cases:
        if jit is not None:
            jit.normal_stream(0, 16)  # compile
        t_np = _time(lambda: ref.normal_stream(3, count), args.repeats)
        t_nb = _time(lambda: jit.normal_stream(3, count), args.repeats) if jit else None
        _row(name, t_np, t_nb)

    rng = np.random.default_rng(0)
    for dims in [(50, 50, 50), (120, 120, 120), (40, 40, 40, 40)]:
        t = rng.standard_normal(dims)
        vs = [v / np.linalg.norm(v) for v in (rng.standard_normal(n) for n in dims)]
        if jit is not None:
            jit.mode_contract(t, vs, 0)
            jit.pair_contract(t, vs, 0, 1)
        label = "x".join(str(n) for n in dims)
        t_np = _time(lambda: ref.mode_contract(t, vs, 1), args.repeats)
        t_nb = _time(lambda: jit.mode_contract(t, vs, 1), args.repeats) if jit else None
        _row(f"mode_contract {label}", t_np, t_nb)
        t_np = _time(lambda: ref.pair_contract(t, vs, 0, len(dims) - 1), args.repeats)
        t_nb = _time(lambda: jit.pair_contract(t, vs, 0, len(dims) - 1), args.repeats) if jit else None
        _row(f"pair_contract {label}", t_np, t_nb)

    for n in (30, 60):
        dims = (n, n, n)
        x = rng.standard_normal(dims)
        comps = [v / np.linalg.norm(v) for v in (rng.standard_normal(m) for m in dims)]
        t = 2.0 * np.einsum("i,j,k->ijk", *comps) + x / np.sqrt(3 * n)
        v0 = [np.ones(m) / np.sqrt(m) for m in dims]
        if jit is not None:
            jit.power_sweeps(t, v0, 1e-10, 500)
        t_np = _time(lambda: ref.power_sweeps(t, v0, 1e-10, 500), args.repeats)
        t_nb = _time(lambda: jit.power_sweeps(t, v0, 1e-10, 500), args.repeats) if jit else None
        _row(f"power_sweeps {n}^3 (snr 2)", t_np, t_nb)

    if jit is None:
        print("\nnumba not importable: only the reference path was timed")


if __name__ == "__main__":
    main()
