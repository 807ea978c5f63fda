"""Command-line pipeline: ingest, classify, project, sandpile, invariance.

Every subcommand writes JSON reports (and CSV/SVG plot data) into --out.
Outputs are deterministic: identical inputs and flags produce byte-identical
files, reports carry a provenance block naming the tool version, the
resolved configuration, and SHA-256 digests of every input file, and runs
are sorted by run_id during report assembly.

Exit codes: 0 when everything succeeded, 2 when some runs produced reports
and others failed, 1 on total failure.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import hashlib
import json
import re
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .classifier import BOUNDARY_HIGH, BOUNDARY_LOW, classification_report_dict, classify, region_plot_data
from .distributions import empirical_distribution, pmf_csv_bytes
from .invariance import check_exponent_invariance, invariance_report_dict
from .plots import PlotSeries, emit_plot
from .powerlaw import FitRange, InsufficientDataError, fit_powerlaw, fit_report_dict
from .records import IngestError, IngestResult, RunManifest, ingest_records, load_manifest, serialize_records
from .sandpile import (
    SandpileConfig,
    avalanche_distribution,
    run_simulation,
    simulation_metadata_dict,
)
from .scaling import (
    HardwareAssumptions,
    NonExtrapolableError,
    ScalingPoint,
    build_projection,
    fit_scaling_line,
    projection_report_dict,
)

EXIT_OK = 0
EXIT_TOTAL_FAILURE = 1
EXIT_PARTIAL = 2


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; this CLI reserves 2 for partial
    success, so usage errors map to the total-failure code instead."""

    def error(self, message):  # noqa: A002 - argparse API
        self.print_usage(sys.stderr)
        self.exit(EXIT_TOTAL_FAILURE, f"{self.prog}: error: {message}\n")


def _add_common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--fit-range", nargs=2, type=int, default=[10, 100], metavar=("A", "B"),
                        help="inclusive count range the power-law fit uses (default 10 100)")
    parser.add_argument("--bins-per-decade", type=int, default=10,
                        help="log-bin resolution (default 10)")
    parser.add_argument("--seed", type=int, default=0, help="RNG seed for seeded subcommands")
    parser.add_argument("--out", type=Path, default=Path("."), help="output directory")
    parser.add_argument("--format", choices=["json", "csv", "svg"], default="csv",
                        help="plot-data emission: json = reports only, csv = CSV plot data, svg = CSV + SVG")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="failtail", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"failtail {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="validate record files and write normalized JSONL")
    p.add_argument("records", nargs="+", type=Path, help="record files (.jsonl or .csv)")
    _add_common_flags(p)

    p = sub.add_parser("classify", help="fit each run's decay rate and assign its level")
    p.add_argument("records", nargs="+", type=Path, help="record files, one run each")
    p.add_argument("--manifest", action="append", type=Path, default=[],
                   help="manifest JSON per run, paired with record files in order")
    _add_common_flags(p)

    p = sub.add_parser("project", help="extrapolate model size needed for a target decay rate")
    p.add_argument("records", nargs="+", type=Path, help="record files, one run each")
    p.add_argument("--manifest", action="append", type=Path, default=[],
                   help="manifest JSON per run (param_count required), paired in order")
    p.add_argument("--target-alpha", type=float, default=3.0)
    p.add_argument("--bytes-per-param", type=float, default=4.0)
    p.add_argument("--gpu-memory-gb", type=float, default=80.0)
    p.add_argument("--gpu-cost", type=float, default=3e4)
    p.add_argument("--reference-market-cap", type=float, default=3.7e12)
    p.add_argument("--doubling-months", type=float, default=18.0)
    p.add_argument("--baseline-params", type=float, default=1e12)
    _add_common_flags(p)

    p = sub.add_parser("sandpile", help="run seeded sandpile simulations and log avalanche sizes")
    p.add_argument("--dim", action="append", type=int, default=None,
                   help="lattice dimension; repeat for a parallel sweep (default 2)")
    p.add_argument("--side", type=int, default=64)
    p.add_argument("--burn-in", type=int, default=None,
                   help="warm-up drives before recording (default 50 x side^dim)")
    p.add_argument("--drives", type=int, default=10000, help="recorded drives")
    p.add_argument("--emit-distribution", action="store_true",
                   help="also write the avalanche-size PMF as CSV")
    _add_common_flags(p)

    p = sub.add_parser("check-scale-invariance", help="compare fits of X and kX")
    p.add_argument("records", nargs="+", type=Path, help="record files, one run each")
    p.add_argument("--k", action="append", type=int, default=None,
                   help="integer scale factor; repeatable (default 2)")
    _add_common_flags(p)

    p = sub.add_parser("report", help="full pipeline: classify, invariance, projection when possible")
    p.add_argument("records", nargs="+", type=Path, help="record files, one run each")
    p.add_argument("--manifest", action="append", type=Path, default=[],
                   help="manifest JSON per run, paired in order")
    p.add_argument("--k", action="append", type=int, default=None,
                   help="invariance scale factor; repeatable (default 2)")
    p.add_argument("--target-alpha", type=float, default=3.0)
    p.add_argument("--bytes-per-param", type=float, default=4.0)
    p.add_argument("--gpu-memory-gb", type=float, default=80.0)
    p.add_argument("--gpu-cost", type=float, default=3e4)
    p.add_argument("--reference-market-cap", type=float, default=3.7e12)
    p.add_argument("--doubling-months", type=float, default=18.0)
    p.add_argument("--baseline-params", type=float, default=1e12)
    _add_common_flags(p)

    return parser


def _write_json(path: Path, obj) -> None:
    path.write_bytes((json.dumps(obj, sort_keys=True, indent=2) + "\n").encode("utf-8"))


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _safe_name(name: str) -> str:
    return re.sub(r"[^-._a-zA-Z0-9]", "_", name)


def _plot_formats(fmt: str) -> tuple[str, ...]:
    if fmt == "json":
        return ()
    if fmt == "csv":
        return ("csv",)
    return ("csv", "svg")


def _fit_options(args) -> tuple[FitRange, int]:
    fit_range = FitRange(int(args.fit_range[0]), int(args.fit_range[1]))
    if args.bins_per_decade < 1:
        raise ValueError(f"--bins-per-decade must be >= 1, got {args.bins_per_decade}")
    return fit_range, args.bins_per_decade


def _provenance(args, command: str, input_paths: Sequence[Path], assumptions: dict) -> dict:
    config = {
        "command": command,
        "fit_range": list(getattr(args, "fit_range", [])),
        "bins_per_decade": getattr(args, "bins_per_decade", None),
        "seed": getattr(args, "seed", None),
        "format": getattr(args, "format", None),
    }
    digest_src = json.dumps({**config, "assumptions": assumptions}, sort_keys=True)
    present = [p for p in dict.fromkeys(input_paths) if p.exists()]
    return {
        "tool": "failtail",
        "version": __version__,
        "config": config,
        "config_hash": hashlib.sha256(digest_src.encode("utf-8")).hexdigest(),
        "input_digests": {str(p): _sha256(p) for p in sorted(present)},
        "assumptions": assumptions,
    }


@dataclass
class LoadedRun:
    run_id: str
    path: Path
    manifest: RunManifest | None
    result: IngestResult


def _infer_format(path: Path) -> str:
    return "csv" if path.suffix.lower() == ".csv" else "jsonl"


def _load_runs(record_paths: Sequence[Path], manifest_paths: Sequence[Path], errors: list[dict]) -> list[LoadedRun]:
    if len(manifest_paths) > len(record_paths):
        raise ValueError(f"{len(manifest_paths)} manifests given for {len(record_paths)} record files")
    runs: list[LoadedRun] = []
    for i, path in enumerate(record_paths):
        manifest = None
        if i < len(manifest_paths):
            try:
                manifest = load_manifest(manifest_paths[i])
            except (OSError, ValueError, TypeError) as exc:
                errors.append({"stage": "manifest", "path": str(manifest_paths[i]), "message": str(exc)})
                continue
        run_id = manifest.run_id if manifest else path.stem
        try:
            result = ingest_records(path, _infer_format(path))
        except (OSError, IngestError) as exc:
            errors.append({"stage": "ingest", "run_id": run_id, "path": str(path), "message": str(exc)})
            continue
        if len(result) == 0:
            errors.append({"stage": "ingest", "run_id": run_id, "path": str(path), "message": "no valid records"})
            continue
        runs.append(LoadedRun(run_id, path, manifest, result))
    return runs


def _exit_code(succeeded: int, failed: int) -> int:
    if failed == 0:
        return EXIT_OK
    if succeeded == 0:
        return EXIT_TOTAL_FAILURE
    return EXIT_PARTIAL


def _classify_one(run: LoadedRun, fit_range: FitRange, bins_per_decade: int, args, out: Path) -> tuple[dict, list[Path]]:
    dist = empirical_distribution(list(run.result))
    fit = fit_powerlaw(dist, fit_range, bins_per_decade)
    level = classify(fit)
    report = classification_report_dict(run.run_id, fit, level)
    report["fit"] = fit_report_dict(fit)
    report["zero_count_mass"] = float(dist.mass_at(0))
    report["rejected_rows"] = len(run.result.rejects)
    plot_files: list[Path] = []
    formats = _plot_formats(args.format)
    if formats:
        data = region_plot_data(dist, fit, bins_per_decade)
        series = [
            PlotSeries("binned-density", data.scatter_x, data.scatter_y, "scatter"),
            PlotSeries("fitted-line", data.line_x, data.fitted_y, "line"),
            PlotSeries("reference-x^-2", data.line_x, data.reference_y[0], "line"),
            PlotSeries("reference-x^-3", data.line_x, data.reference_y[1], "line"),
        ]
        plot_files = emit_plot(
            series,
            out / f"plot_{_safe_name(run.run_id)}",
            formats,
            title=f"{run.run_id}: alpha={fit.alpha:.3f} ({level.level.value})",
            regions=data.regions,
            version=__version__,
        )
    return report, plot_files


def cmd_ingest(args) -> int:
    out: Path = args.out
    out.mkdir(parents=True, exist_ok=True)
    entries = []
    errors = []
    for path in args.records:
        try:
            result = ingest_records(path, _infer_format(path))
        except (OSError, IngestError) as exc:
            errors.append({"stage": "ingest", "path": str(path), "message": str(exc)})
            continue
        normalized = out / f"normalized_{_safe_name(path.stem)}.jsonl"
        normalized.write_bytes(serialize_records(list(result), "jsonl"))
        entries.append({
            "path": str(path),
            "accepted": len(result),
            "rejected": len(result.rejects),
            "total_rows": result.total_rows,
            "rejects": [[line, reason] for line, reason in result.rejects],
            "normalized": str(normalized),
        })
    bundle = {
        "files": entries,
        "errors": errors,
        "provenance": _provenance(args, "ingest", list(args.records), {}),
    }
    _write_json(out / "ingest_report.json", bundle)
    return _exit_code(len(entries), len(errors))


def cmd_classify(args) -> int:
    out: Path = args.out
    out.mkdir(parents=True, exist_ok=True)
    try:
        fit_range, bins_per_decade = _fit_options(args)
    except ValueError as exc:
        _write_json(out / "classification_report.json", {"classifications": [], "errors": [{"stage": "options", "message": str(exc)}]})
        return EXIT_TOTAL_FAILURE
    errors: list[dict] = []
    runs = _load_runs(args.records, args.manifest, errors)
    reports = []
    plot_files: list[Path] = []
    for run in runs:
        try:
            report, files = _classify_one(run, fit_range, bins_per_decade, args, out)
        except InsufficientDataError as exc:
            errors.append({"stage": "fit", "run_id": run.run_id, "message": str(exc), "points_found": exc.points_found})
            continue
        except ValueError as exc:
            errors.append({"stage": "classify", "run_id": run.run_id, "message": str(exc)})
            continue
        reports.append(report)
        plot_files.extend(files)
        _write_json(out / f"classification_{_safe_name(run.run_id)}.json", report)
    reports.sort(key=lambda r: r["run_id"])
    assumptions = {
        "fit_range": [fit_range.x_min, fit_range.x_max],
        "bins_per_decade": bins_per_decade,
        "level_boundaries": [BOUNDARY_LOW, BOUNDARY_HIGH],
        "boundary_rule": "boundary alpha maps to the lower level",
    }
    bundle = {
        "classifications": reports,
        "errors": errors,
        "plot_files": sorted(str(p) for p in plot_files),
        "provenance": _provenance(args, "classify", list(args.records) + list(args.manifest), assumptions),
    }
    _write_json(out / "classification_report.json", bundle)
    return _exit_code(len(reports), len(errors))


def _hardware_from_args(args) -> HardwareAssumptions:
    return HardwareAssumptions(
        bytes_per_param=args.bytes_per_param,
        gpu_memory_bytes=args.gpu_memory_gb * 1e9,
        gpu_unit_cost=args.gpu_cost,
        reference_market_cap=args.reference_market_cap,
        doubling_months=args.doubling_months,
        current_max_params=args.baseline_params,
    )


def _projection_section(runs_with_alpha: list[tuple[LoadedRun, float]], args, errors: list[dict], out: Path) -> tuple[dict | None, list[Path]]:
    points = [
        ScalingPoint(run.manifest.param_count, alpha, run.run_id)
        for run, alpha in runs_with_alpha
        if run.manifest is not None and run.manifest.param_count is not None
    ]
    if len({p.param_count for p in points}) < 2:
        errors.append({
            "stage": "project",
            "message": f"projection needs >= 2 runs with distinct param_count, found {len(points)}",
        })
        return None, []
    hw = _hardware_from_args(args)
    try:
        projection = build_projection(points, args.target_alpha, hw)
    except NonExtrapolableError as exc:
        line = fit_scaling_line(points)
        return {
            "non_extrapolable": True,
            "reason": str(exc),
            "slope": line.slope,
            "intercept": line.intercept,
            "r_squared": line.r_squared,
            "target_alpha": args.target_alpha,
        }, []
    report = projection_report_dict(projection)
    report["non_extrapolable"] = False
    report["points"] = [
        {"run_id": p.run_id, "param_count": p.param_count, "alpha": p.alpha}
        for p in sorted(points, key=lambda p: (p.param_count, p.run_id))
    ]
    plot_files: list[Path] = []
    formats = _plot_formats(args.format)
    if formats:
        xs = np.array([p.param_count for p in points], dtype=np.float64)
        ys = np.array([p.alpha for p in points], dtype=np.float64)
        line_x = np.geomspace(xs.min(), projection.required_params, 64)
        line_y = 10.0 ** (projection.intercept + projection.slope * np.log10(line_x))
        target_y = np.full_like(line_x, args.target_alpha)
        series = [
            PlotSeries("observed", xs, ys, "scatter"),
            PlotSeries("fit-and-extrapolation", line_x, line_y, "line"),
            PlotSeries("target-alpha", line_x, target_y, "line"),
        ]
        plot_files = emit_plot(
            series,
            out / "plot_scaling",
            formats,
            title=f"decay rate vs model size (target alpha {args.target_alpha})",
            version=__version__,
        )
    return report, plot_files


def cmd_project(args) -> int:
    out: Path = args.out
    out.mkdir(parents=True, exist_ok=True)
    try:
        fit_range, bins_per_decade = _fit_options(args)
    except ValueError as exc:
        _write_json(out / "projection_report.json", {"projection": None, "errors": [{"stage": "options", "message": str(exc)}]})
        return EXIT_TOTAL_FAILURE
    errors: list[dict] = []
    runs = _load_runs(args.records, args.manifest, errors)
    runs_with_alpha: list[tuple[LoadedRun, float]] = []
    for run in runs:
        try:
            dist = empirical_distribution(list(run.result))
            fit = fit_powerlaw(dist, fit_range, bins_per_decade)
        except InsufficientDataError as exc:
            errors.append({"stage": "fit", "run_id": run.run_id, "message": str(exc), "points_found": exc.points_found})
            continue
        runs_with_alpha.append((run, fit.alpha))
    projection, plot_files = _projection_section(runs_with_alpha, args, errors, out)
    hw = _hardware_from_args(args)
    assumptions = {
        "fit_range": [fit_range.x_min, fit_range.x_max],
        "bins_per_decade": bins_per_decade,
        "target_alpha": args.target_alpha,
        "bytes_per_param": hw.bytes_per_param,
        "gpu_memory_bytes": hw.gpu_memory_bytes,
        "gpu_unit_cost": hw.gpu_unit_cost,
        "reference_market_cap": hw.reference_market_cap,
        "doubling_months": hw.doubling_months,
        "current_max_params": hw.current_max_params,
        "extrapolation": "optimistic",
    }
    bundle = {
        "projection": projection,
        "alphas": sorted(
            ({"run_id": run.run_id, "alpha": alpha} for run, alpha in runs_with_alpha),
            key=lambda r: r["run_id"],
        ),
        "errors": errors,
        "plot_files": sorted(str(p) for p in plot_files),
        "provenance": _provenance(args, "project", list(args.records) + list(args.manifest), assumptions),
    }
    _write_json(out / "projection_report.json", bundle)
    if projection is None:
        return EXIT_TOTAL_FAILURE
    return _exit_code(len(runs_with_alpha), len(errors))


def _run_one_sandpile(config: SandpileConfig):
    log, state = run_simulation(config)
    return log, state


def cmd_sandpile(args) -> int:
    out: Path = args.out
    out.mkdir(parents=True, exist_ok=True)
    dims = args.dim if args.dim else [2]
    try:
        fit_range, bins_per_decade = _fit_options(args)
        configs = [
            SandpileConfig(
                dimension=dim,
                side_length=args.side,
                recorded_drives=args.drives,
                rng_seed=args.seed + i,
                burn_in_drives=args.burn_in,
            )
            for i, dim in enumerate(dims)
        ]
    except ValueError as exc:
        _write_json(out / "sandpile_report.json", {"simulations": [], "errors": [{"stage": "options", "message": str(exc)}]})
        return EXIT_TOTAL_FAILURE
    if len(configs) > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=min(len(configs), 4)) as pool:
            results = list(pool.map(_run_one_sandpile, configs))
    else:
        results = [_run_one_sandpile(configs[0])]
    simulations = []
    for config, (log, state) in zip(configs, results):
        tag = f"dim{config.dimension}_side{config.side_length}"
        sizes_path = out / f"avalanche_sizes_{tag}.txt"
        sizes_path.write_bytes(("\n".join(str(int(s)) for s in log.sizes) + "\n").encode("utf-8"))
        metadata = simulation_metadata_dict(config, state, log)
        try:
            dist, zero_fraction = avalanche_distribution(log)
            metadata["zero_size_fraction"] = zero_fraction
            if args.emit_distribution:
                (out / f"distribution_{tag}.csv").write_bytes(pmf_csv_bytes(dist))
            try:
                fit = fit_powerlaw(dist, fit_range, bins_per_decade)
                metadata["fit"] = fit_report_dict(fit)
            except InsufficientDataError as exc:
                metadata["fit"] = None
                metadata["fit_error"] = str(exc)
        except ValueError as exc:
            metadata["zero_size_fraction"] = 1.0
            metadata["fit"] = None
            metadata["fit_error"] = str(exc)
        metadata["sizes_file"] = str(sizes_path)
        _write_json(out / f"sandpile_{tag}.json", metadata)
        simulations.append(metadata)
    assumptions = {
        "fit_range": [fit_range.x_min, fit_range.x_max],
        "bins_per_decade": bins_per_decade,
        "burn_in_default": "50 x side^dim when --burn-in is not given",
        "drive_sites": "uniform random, seeded; sweep config i uses seed + i",
        "avalanche_size_convention": "toppling-events",
    }
    bundle = {
        "simulations": simulations,
        "errors": [],
        "provenance": _provenance(args, "sandpile", [], assumptions),
    }
    _write_json(out / "sandpile_report.json", bundle)
    return EXIT_OK


def cmd_check_scale_invariance(args) -> int:
    out: Path = args.out
    out.mkdir(parents=True, exist_ok=True)
    ks = args.k if args.k else [2]
    try:
        fit_range, bins_per_decade = _fit_options(args)
        for k in ks:
            if k < 1:
                raise ValueError(f"--k must be >= 1, got {k}")
    except ValueError as exc:
        _write_json(out / "invariance_report.json", {"checks": [], "errors": [{"stage": "options", "message": str(exc)}]})
        return EXIT_TOTAL_FAILURE
    errors: list[dict] = []
    runs = _load_runs(args.records, [], errors)
    checks = []
    succeeded_runs = 0
    for run in runs:
        run_ok = False
        for k in ks:
            try:
                report = check_exponent_invariance(list(run.result), k, fit_range, bins_per_decade)
            except InsufficientDataError as exc:
                errors.append({"stage": "invariance", "run_id": run.run_id, "k": k, "message": str(exc)})
                continue
            entry = invariance_report_dict(report)
            entry["run_id"] = run.run_id
            checks.append(entry)
            run_ok = True
        if run_ok:
            succeeded_runs += 1
    checks.sort(key=lambda c: (c["run_id"], c["k"]))
    assumptions = {
        "fit_range": [fit_range.x_min, fit_range.x_max],
        "bins_per_decade": bins_per_decade,
        "scaled_fit_range": "[k*x_min, k*x_max]",
        "assumption_r_squared_floor": 0.95,
    }
    bundle = {
        "checks": checks,
        "errors": errors,
        "provenance": _provenance(args, "check-scale-invariance", list(args.records), assumptions),
    }
    _write_json(out / "invariance_report.json", bundle)
    return _exit_code(succeeded_runs, len(errors))


def cmd_report(args) -> int:
    out: Path = args.out
    out.mkdir(parents=True, exist_ok=True)
    try:
        fit_range, bins_per_decade = _fit_options(args)
    except ValueError as exc:
        _write_json(out / "report.json", {"classifications": [], "errors": [{"stage": "options", "message": str(exc)}]})
        return EXIT_TOTAL_FAILURE
    ks = args.k if args.k else [2]
    errors: list[dict] = []
    runs = _load_runs(args.records, args.manifest, errors)
    classifications = []
    invariance_checks = []
    plot_files: list[Path] = []
    runs_with_alpha: list[tuple[LoadedRun, float]] = []
    for run in runs:
        try:
            report, files = _classify_one(run, fit_range, bins_per_decade, args, out)
        except InsufficientDataError as exc:
            errors.append({"stage": "fit", "run_id": run.run_id, "message": str(exc), "points_found": exc.points_found})
            continue
        classifications.append(report)
        plot_files.extend(files)
        runs_with_alpha.append((run, report["alpha"]))
        for k in ks:
            try:
                inv = check_exponent_invariance(list(run.result), k, fit_range, bins_per_decade)
            except InsufficientDataError as exc:
                errors.append({"stage": "invariance", "run_id": run.run_id, "k": k, "message": str(exc)})
                continue
            entry = invariance_report_dict(inv)
            entry["run_id"] = run.run_id
            invariance_checks.append(entry)
    classifications.sort(key=lambda r: r["run_id"])
    invariance_checks.sort(key=lambda c: (c["run_id"], c["k"]))
    projection_errors: list[dict] = []
    projection, proj_plots = _projection_section(runs_with_alpha, args, projection_errors, out)
    # A report without enough sized runs simply omits the projection.
    notes = [e["message"] for e in projection_errors]
    plot_files.extend(proj_plots)
    hw = _hardware_from_args(args)
    assumptions = {
        "fit_range": [fit_range.x_min, fit_range.x_max],
        "bins_per_decade": bins_per_decade,
        "level_boundaries": [BOUNDARY_LOW, BOUNDARY_HIGH],
        "boundary_rule": "boundary alpha maps to the lower level",
        "invariance_k": ks,
        "target_alpha": args.target_alpha,
        "bytes_per_param": hw.bytes_per_param,
        "gpu_memory_bytes": hw.gpu_memory_bytes,
        "gpu_unit_cost": hw.gpu_unit_cost,
        "reference_market_cap": hw.reference_market_cap,
        "doubling_months": hw.doubling_months,
        "current_max_params": hw.current_max_params,
    }
    bundle = {
        "classifications": classifications,
        "invariance": invariance_checks,
        "projection": projection,
        "projection_notes": notes,
        "errors": errors,
        "plot_files": sorted(str(p) for p in plot_files),
        "provenance": _provenance(args, "report", list(args.records) + list(args.manifest), assumptions),
    }
    _write_json(out / "report.json", bundle)
    return _exit_code(len(classifications), len(errors))


_COMMANDS = {
    "ingest": cmd_ingest,
    "classify": cmd_classify,
    "project": cmd_project,
    "sandpile": cmd_sandpile,
    "check-scale-invariance": cmd_check_scale_invariance,
    "report": cmd_report,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except BrokenPipeError:  # pragma: no cover - shell plumbing
        return EXIT_TOTAL_FAILURE


if __name__ == "__main__":
    sys.exit(main())
