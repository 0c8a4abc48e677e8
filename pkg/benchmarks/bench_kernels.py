#!/usr/bin/env python3
"""Timing comparison of the compiled kernels against the numpy fallback.

Runs the three numeric kernels on representative workloads with both
backends, reports best-of-``--repeat`` wall times, the speedup, and the
largest value deviation between the two implementations.

Usage::

    python benchmarks/bench_kernels.py [--repeat 7] [--n-modes 400]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from xxzquench import _kernels_py

try:
    from xxzquench import _kernels
except ImportError:  # pragma: no cover - fallback-only build
    _kernels = None


def _best_time(func, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        func()
        best = min(best, time.perf_counter() - start)
    return best


def _workloads(n_modes: int, n_times: int):
    rng = np.random.default_rng(20240817)
    q = np.sort(rng.uniform(0.01, np.pi - 0.01, n_modes))
    a = rng.standard_normal(n_modes)
    b = rng.standard_normal(n_modes)
    eps = np.hypot(a, b) + 1e-6
    theta = rng.uniform(-np.pi / 2, np.pi / 2, n_modes)
    phi = rng.uniform(-0.5, 0.5, n_modes)
    times = np.linspace(0.0, 40.0, n_times)
    thetas = np.linspace(0.0, np.pi, 65)
    phis = np.linspace(0.0, 2.0 * np.pi, 129)
    c = rng.uniform(-0.9, 0.9, 4)

    def gap_map(mod):
        return lambda: mod.gap_map_sums(a, b, eps, np.cos(q), np.sin(q))

    def series(mod):
        return lambda: mod.correlator_series(
            q,
            eps,
            np.cos(2 * theta),
            np.sin(2 * theta),
            np.cos(2 * phi),
            np.sin(2 * phi),
            [0, 1, 2, 3],
            [1, 2, 3],
            times,
        )

    def scan(mod):
        # tie-broken indices may legitimately differ; compare the value
        return lambda: mod.basis_grid_scan(c[0], c[1], c[2], c[3], thetas, phis)[0]

    return [
        (f"gap_map_sums ({n_modes} modes)", gap_map),
        (f"correlator_series ({n_modes} modes x {n_times} times)", series),
        ("basis_grid_scan (65x129 grid)", scan),
    ]


def _deviation(fast, slow) -> float:
    if not isinstance(fast, tuple):
        fast, slow = (fast,), (slow,)
    worst = 0.0
    for x, y in zip(fast, slow):
        worst = max(worst, float(np.max(np.abs(np.asarray(x) - np.asarray(y)))))
    return worst


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=7, help="timing repetitions")
    parser.add_argument("--n-modes", type=int, default=400, help="momentum modes")
    parser.add_argument("--n-times", type=int, default=200, help="time samples")
    args = parser.parse_args()

    if _kernels is None:
        print("compiled extension not available; nothing to compare")
        return 1

    header = f"{'kernel':<45} {'compiled':>10} {'python':>10} {'speedup':>8} {'max dev':>10}"
    print(header)
    print("-" * len(header))
    for label, make in _workloads(args.n_modes, args.n_times):
        fast_call = make(_kernels)
        slow_call = make(_kernels_py)
        deviation = _deviation(fast_call(), slow_call())
        fast = _best_time(fast_call, args.repeat)
        slow = _best_time(slow_call, args.repeat)
        print(
            f"{label:<45} {1e3 * fast:>8.3f}ms {1e3 * slow:>8.3f}ms "
            f"{slow / fast:>7.1f}x {deviation:>10.2e}"
        )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
