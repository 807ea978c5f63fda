"""Benchmark the compiled sandpile kernel against the pure-Python fallback.

Runs the same seeded simulation through both backends, checks the results
are identical, and reports wall-clock timings.

Usage: python benchmarks/bench_sandpile.py [--side N] [--drives N] [--dim D]
"""

import argparse
import time

import numpy as np

from failtail.sandpile import SandpileConfig, run_simulation


def time_backend(config: SandpileConfig, backend: str):
    start = time.perf_counter()
    log, state = run_simulation(config, backend=backend)
    elapsed = time.perf_counter() - start
    return log, state, elapsed


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--dim", type=int, default=2)
    parser.add_argument("--side", type=int, default=32)
    parser.add_argument("--drives", type=int, default=20000)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    config = SandpileConfig(
        dimension=args.dim,
        side_length=args.side,
        recorded_drives=args.drives,
        rng_seed=args.seed,
    )
    print(f"config: dim={config.dimension} side={config.side_length} "
          f"burn_in={config.burn_in_drives} recorded={config.recorded_drives}")

    results = {}
    for backend in ("compiled", "python"):
        try:
            log, state, elapsed = time_backend(config, backend)
        except ImportError:
            print(f"{backend:>8}: unavailable")
            continue
        results[backend] = (log, state, elapsed)
        total = config.burn_in_drives + config.recorded_drives
        print(f"{backend:>8}: {elapsed:8.3f} s  ({total / elapsed:,.0f} drives/s, "
              f"mean avalanche {log.sizes.mean():.1f})")

    if len(results) == 2:
        log_c, state_c, t_c = results["compiled"]
        log_p, state_p, t_p = results["python"]
        same = np.array_equal(log_c.sizes, log_p.sizes) and np.array_equal(state_c.heights, state_p.heights)
        print(f"identical results: {same}")
        print(f"speedup: {t_p / t_c:.1f}x")
        if not same:
            return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
