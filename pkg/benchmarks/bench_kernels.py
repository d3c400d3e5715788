"""Time the numba and pure-numpy kernels on the same inputs.

    python benchmarks/bench_kernels.py [--draws N] [--repeat R] [--seed S]

Numba compile time is excluded by a warm-up call. Results of the two
backends are compared before any timing is reported.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from kerrfpi import _kernels


def cases(draws: int, seed: int):
    rng = np.random.default_rng(seed)
    Y = rng.uniform(0, 20, draws)
    D0 = rng.uniform(-6, 6, draws)
    D1 = rng.uniform(-4, 4, draws)
    eta = 1.0 / (1.0 + np.abs(Y * D1))
    omega = np.linspace(-5, 5, 9)
    return {
        "scan_roots": lambda: _kernels.scan_roots(Y, D0, D1, Y + 1.0, 4001),
        "fixed_point": lambda: _kernels.fixed_point(Y, D0, D1, np.zeros_like(Y), eta, 1e-13, 2_000_000),
        "fluct_riemann": lambda: _kernels.fluct_riemann(omega, -402.0, 0.02, 40201, 2.6, 1.0, 0.8, 1.0),
    }


def best_of(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--draws", type=int, default=2000)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    if not _kernels.HAVE_NUMBA:
        raise SystemExit("numba is not importable; nothing to compare")

    work = cases(args.draws, args.seed)
    print(f"{'kernel':<15}{'numba [s]':>12}{'numpy [s]':>12}{'speed-up':>10}")
    for name, fn in work.items():
        results = {}
        timings = {}
        for backend in ("numba", "numpy"):
            _kernels.select_backend(backend)
            results[backend] = fn()  # warm-up, compiles on first numba call
            timings[backend] = best_of(fn, args.repeat)
        a, b = results["numba"], results["numpy"]
        a, b = (a, b) if isinstance(a, tuple) else ((a,), (b,))
        for x, y in zip(a, b):
            np.testing.assert_allclose(x, y, rtol=1e-10, atol=1e-12, equal_nan=True)
        ratio = timings["numpy"] / timings["numba"]
        print(f"{name:<15}{timings['numba']:>12.4f}{timings['numpy']:>12.4f}{ratio:>9.1f}x")
    _kernels.select_backend("numba")


if __name__ == "__main__":
    main()
