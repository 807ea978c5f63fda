"""Command line for extracting failure-count runs from offline models.

    failrank extract --model bigram --dataset tiny-corpus \
        --task-kind next-token --min-prefix 1 --out runs/

writes ``<run_id>.jsonl``, ``<run_id>.manifest.json``, and
``<run_id>.extraction.json`` into the output directory. Exit code 0 means
the job ran (per-instance scoring errors are recorded in the extraction
log, not fatal); 1 means the job itself could not run.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Sequence

from failrank import __version__
from failrank.extract import ExtractionJob, JobError, extract_run, write_result
from failrank.models import TASK_KINDS

__all__ = ["build_parser", "main", "EXIT_OK", "EXIT_ERROR"]

EXIT_OK = 0
EXIT_ERROR = 1


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; this CLI uses 1 for every failure."""

    def error(self, message):  # noqa: A002 - argparse API
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="failrank", description=__doc__.splitlines()[0])
    parser.add_argument(
        "--version", action="version", version=f"failrank {__version__}"
    )
    sub = parser.add_subparsers(dest="command", required=True)
    extract = sub.add_parser(
        "extract",
        help="score a dataset with a model and emit failure-count records",
    )
    extract.add_argument(
        "--model",
        required=True,
        help="builtin model name (bigram, oracle, reversed)",
    )
    extract.add_argument(
        "--dataset",
        required=True,
        help="dataset path, or a bundled name such as tiny-corpus",
    )
    extract.add_argument("--task-kind", required=True, choices=TASK_KINDS)
    extract.add_argument(
        "--shots",
        type=int,
        default=0,
        help="leading documents or rows held out as context (default 0)",
    )
    extract.add_argument(
        "--min-prefix",
        type=int,
        default=None,
        metavar="N",
        help="next-token only: skip positions with fewer than N prefix tokens "
        "(default 1000)",
    )
    extract.add_argument(
        "--pessimistic-ties",
        action="store_true",
        help="count score ties against the subject instead of for it",
    )
    extract.add_argument(
        "--run-id", default=None, help="override the derived run identifier"
    )
    extract.add_argument(
        "--out", type=Path, default=Path("."), help="output directory"
    )
    return parser


def cmd_extract(args: argparse.Namespace) -> int:
    try:
        job = ExtractionJob(
            task_kind=args.task_kind,
            model=args.model,
            dataset=args.dataset,
            prefix_min_length=args.min_prefix,
            shots=args.shots,
            pessimistic_ties=args.pessimistic_ties,
            run_id=args.run_id,
        )
        result = extract_run(job)
    except (JobError, ValueError) as exc:
        print(f"failrank: {exc}", file=sys.stderr)
        return EXIT_ERROR
    paths = write_result(result, args.out)
    print(
        f"{result.manifest['run_id']}: {len(result.records)} records, "
        f"{result.skipped} skipped, {len(result.errors)} errors "
        f"-> {paths['records']}"
    )
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return cmd_extract(args)


if __name__ == "__main__":
    sys.exit(main())
