#!/usr/bin/env python3
"""Timing comparison of the numba and numpy kernel backends.

Run from the repository root:

    python3 benchmarks/bench_kernels.py

The numba columns disappear when the backend is disabled (CHIRPLINK_NUMBA=0)
or numba is not installed.
"""

import time

import numpy as np

from chirplink import _kernels


def _time(fn, *args, repeats=5):
    fn(*args)  # warm up (and trigger JIT compilation)
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_jakes(n_samples: int, n_sinusoids: int = 64):
    rng = np.random.default_rng(0)
    angles = 2 * np.pi * (np.arange(n_sinusoids) + 0.5) / n_sinusoids
    omegas = 2 * np.pi * 50.0 * np.cos(angles)
    phases = rng.uniform(0, 2 * np.pi, n_sinusoids)
    args = (omegas, phases, 4e-6, n_samples)
    rows = [("numpy", _time(_kernels.jakes_trace_numpy, *args))]
    if _kernels.jakes_trace_numba is not None:
        rows.append(("numba", _time(_kernels.jakes_trace_numba, *args)))
    return rows


def bench_tdl(n_samples: int, n_taps: int = 12):
    rng = np.random.default_rng(1)
    x = rng.standard_normal(n_samples) + 1j * rng.standard_normal(n_samples)
    delays = np.arange(n_taps, dtype=np.int64)
    gains = rng.standard_normal((n_taps, n_samples)) + 1j * rng.standard_normal(
        (n_taps, n_samples)
    )
    args = (x, delays, gains)
    rows = [("numpy", _time(_kernels.tdl_apply_numpy, *args))]
    if _kernels.tdl_apply_numba is not None:
        rows.append(("numba", _time(_kernels.tdl_apply_numba, *args)))
    return rows


def main() -> None:
    print(f"active backend: {_kernels.backend_name()}")
    for n in (4_320, 43_200, 432_000):
        print(f"\nfading trace, {n} samples x 64 sinusoids")
        rows = bench_jakes(n)
        base = rows[0][1]
        for name, t in rows:
            print(f"  {name:6s} {t * 1e3:9.3f} ms   x{base / t:5.2f}")
        print(f"12-tap delay line, {n} samples")
        rows = bench_tdl(n)
        base = rows[0][1]
        for name, t in rows:
            print(f"  {name:6s} {t * 1e3:9.3f} ms   x{base / t:5.2f}")


if __name__ == "__main__":
    main()
