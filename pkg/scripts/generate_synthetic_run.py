"""Generate a synthetic evaluation run with power-law failure counts.

Writes <name>.jsonl (records) and <name>.manifest.json next to each other,
ready for the failtail CLI. Counts are drawn from a discrete power law
x^-alpha on [10, 10^4] by inverse-CDF sampling, so `failtail classify`
recovers alpha and the resulting level.
"""

import argparse
import json
from pathlib import Path

import numpy as np


def sample_counts(alpha: float, n: int, seed: int, lo: int = 10, hi: int = 10**4) -> np.ndarray:
    xs = np.arange(lo, hi + 1, dtype=np.float64)
    weights = xs**-alpha
    cdf = np.cumsum(weights) / weights.sum()
    rng = np.random.default_rng(seed)
    return xs.astype(np.int64)[np.searchsorted(cdf, rng.random(n), side="left")]


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--alpha", type=float, default=1.7, help="decay exponent (default 1.7)")
    parser.add_argument("--n", type=int, default=200_000, help="number of records")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--param-count", type=int, default=10**9, help="model size for the manifest")
    parser.add_argument("--name", default="synthetic_run", help="output base name")
    parser.add_argument("--out", type=Path, default=Path("."), help="output directory")
    args = parser.parse_args()

    args.out.mkdir(parents=True, exist_ok=True)
    counts = sample_counts(args.alpha, args.n, args.seed)
    records_path = args.out / f"{args.name}.jsonl"
    with records_path.open("w") as fh:
        for i, count in enumerate(counts):
            fh.write(json.dumps({"instance_id": f"i{i:06d}", "failure_count": int(count)}) + "\n")
    manifest_path = args.out / f"{args.name}.manifest.json"
    manifest_path.write_text(
        json.dumps(
            {
                "run_id": args.name,
                "subject_name": f"synthetic-alpha-{args.alpha}",
                "param_count": args.param_count,
                "task": "synthetic",
                "dataset": f"powerlaw(alpha={args.alpha}, seed={args.seed})",
                "seed": args.seed,
            },
            indent=2,
        )
        + "\n"
    )
    print(f"wrote {records_path} ({args.n} records) and {manifest_path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
