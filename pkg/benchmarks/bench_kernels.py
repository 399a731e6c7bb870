#!/usr/bin/env python3
"""Time the compiled streaming kernels against the pure-numpy fallback.

Run after installing the package:

    python3 benchmarks/bench_kernels.py
    python3 benchmarks/bench_kernels.py --size 2000000 --window 30000 --repeats 5

Both implementations compute identical results (the tests enforce 1e-9
agreement); this script only reports wall-clock time and the speedup.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from sqzkit._kernels import impl_modules


def _best_of(repeats: int, fn, *args) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--size", type=int, default=475_000, help="trace length (quadrature samples)")
    ap.add_argument("--window", type=int, default=10_000, help="rolling window length")
    ap.add_argument("--max-delay", type=int, default=25, help="delay scan half-range")
    ap.add_argument("--repeats", type=int, default=3, help="take the best of this many runs")
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    x = rng.standard_normal(args.size)
    y = 0.7 * x + 0.3 * rng.standard_normal(args.size)
    start = args.max_delay
    stop = args.size - args.window - args.max_delay + 1

    impls = impl_modules()
    if "compiled" not in impls:
        print("note: compiled extension not available; timing fallback only\n")

    rows = []
    for name, mod in impls.items():
        t_roll = _best_of(args.repeats, mod.rolling_variance, x, args.window)
        t_vis = _best_of(
            args.repeats, mod.delay_visibility_mean, x, y, -args.max_delay, args.window, start, stop
        )
        rows.append((name, t_roll, t_vis))

    print(f"trace={args.size}  window={args.window}  best of {args.repeats}\n")
    print(f"{'backend':<10} {'rolling_variance':>18} {'delay_visibility':>18}")
    for name, t_roll, t_vis in rows:
        print(f"{name:<10} {t_roll * 1e3:>15.2f} ms {t_vis * 1e3:>15.2f} ms")
    if len(rows) == 2:
        by_name = {r[0]: r for r in rows}
        f, c = by_name["fallback"], by_name["compiled"]
        print(f"\nspeedup: rolling_variance x{f[1] / c[1]:.1f}, delay_visibility x{f[2] / c[2]:.1f}")


if __name__ == "__main__":
    main()
