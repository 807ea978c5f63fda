"""End-to-end command-line pipeline."""

import json
import math
import subprocess
import sys

import pytest

import oracles
from failtail.cli import EXIT_OK, EXIT_PARTIAL, EXIT_TOTAL_FAILURE, main


def _write_run(path, alpha, hi=2000):
    pmf = oracles.power_pmf(alpha, 1, hi)
    lines = [
        json.dumps({"instance_id": f"i{x}", "failure_count": x, "weight": p * 10**6})
        for x, p in pmf.items()
    ]
    path.write_text("\n".join(lines) + "\n")
    return path


def _write_manifest(path, run_id, param_count):
    path.write_text(json.dumps({"run_id": run_id, "param_count": param_count}))
    return path


def _read_json(path):
    return json.loads(path.read_text())


def test_ingest_normalizes_and_counts(tmp_path):
    src = tmp_path / "run.jsonl"
    src.write_text(
        '{"instance_id":"a","failure_count":3}\n'
        '{"instance_id":"b","failure_count":-2}\n'
        '{"instance_id":"c","failure_count":0,"weight":2.0}\n'
    )
    out = tmp_path / "out"
    assert main(["ingest", str(src), "--out", str(out)]) == EXIT_OK
    report = _read_json(out / "ingest_report.json")
    (entry,) = report["files"]
    assert (entry["accepted"], entry["rejected"], entry["total_rows"]) == (2, 1, 3)
    assert entry["rejects"][0][0] == 2
    normalized = out / "normalized_run.jsonl"
    assert normalized.exists()
    # normalizing the normalized file is the identity
    out2 = tmp_path / "out2"
    assert main(["ingest", str(normalized), "--out", str(out2)]) == EXIT_OK
    assert (out2 / f"normalized_{normalized.stem}.jsonl").read_bytes() == normalized.read_bytes()


def test_ingest_reads_csv(tmp_path):
    src = tmp_path / "run.csv"
    src.write_text("instance_id,failure_count\na,4\nb,9\n")
    out = tmp_path / "out"
    assert main(["ingest", str(src), "--out", str(out)]) == EXIT_OK
    assert _read_json(out / "ingest_report.json")["files"][0]["accepted"] == 2


def test_ingest_partial_and_total_failure(tmp_path):
    good = _write_run(tmp_path / "good.jsonl", 2.0)
    missing = tmp_path / "missing.jsonl"
    out = tmp_path / "out"
    assert main(["ingest", str(good), str(missing), "--out", str(out)]) == EXIT_PARTIAL
    assert main(["ingest", str(missing), "--out", str(tmp_path / "out2")]) == EXIT_TOTAL_FAILURE


def test_classify_limited_run(tmp_path):
    run = _write_run(tmp_path / "subject.jsonl", 1.7)
    manifest = _write_manifest(tmp_path / "m.json", "subject-a", 10**9)
    out = tmp_path / "out"
    code = main(["classify", str(run), "--manifest", str(manifest), "--out", str(out)])
    assert code == EXIT_OK
    report = _read_json(out / "classification_subject-a.json")
    assert report["level"] == "Limited"
    assert report["alpha"] == pytest.approx(1.7, abs=0.05)
    assert report["boundaries"] == [2.0, 3.0]
    bundle = _read_json(out / "classification_report.json")
    assert [c["run_id"] for c in bundle["classifications"]] == ["subject-a"]
    assert bundle["provenance"]["config"]["fit_range"] == [10, 100]
    assert str(run) in bundle["provenance"]["input_digests"]
    # default --format csv writes plot data
    assert (out / "plot_subject-a.csv").exists()
    assert not (out / "plot_subject-a.svg").exists()


def test_classify_svg_and_json_formats(tmp_path):
    run = _write_run(tmp_path / "r.jsonl", 2.5)
    out_svg = tmp_path / "svg"
    main(["classify", str(run), "--out", str(out_svg), "--format", "svg"])
    assert (out_svg / "plot_r.csv").exists()
    svg = (out_svg / "plot_r.svg").read_text()
    for series in ("binned-density", "fitted-line", "reference-x^-2", "reference-x^-3"):
        assert series in svg
    out_json = tmp_path / "json"
    main(["classify", str(run), "--out", str(out_json), "--format", "json"])
    assert not list(out_json.glob("plot_*"))


def test_classify_partial_failure_exit_code(tmp_path):
    good = _write_run(tmp_path / "good.jsonl", 2.2)
    sparse = tmp_path / "sparse.jsonl"
    sparse.write_text('{"instance_id":"a","failure_count":3}\n')
    out = tmp_path / "out"
    assert main(["classify", str(good), str(sparse), "--out", str(out)]) == EXIT_PARTIAL
    bundle = _read_json(out / "classification_report.json")
    assert len(bundle["classifications"]) == 1
    assert bundle["errors"][0]["stage"] == "fit"


def test_classify_total_failure_exit_code(tmp_path):
    sparse = tmp_path / "sparse.jsonl"
    sparse.write_text('{"instance_id":"a","failure_count":3}\n')
    assert main(["classify", str(sparse), "--out", str(tmp_path / "out")]) == EXIT_TOTAL_FAILURE


def test_explicit_default_fit_range_is_identity(tmp_path):
    run = _write_run(tmp_path / "r.jsonl", 2.0)
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    main(["classify", str(run), "--out", str(out_a)])
    main(["classify", str(run), "--out", str(out_b), "--fit-range", "10", "100"])
    assert (out_a / "classification_r.json").read_bytes() == (out_b / "classification_r.json").read_bytes()


def test_fit_range_flag_changes_fit(tmp_path):
    run = _write_run(tmp_path / "r.jsonl", 2.0, hi=5000)
    out = tmp_path / "out"
    main(["classify", str(run), "--out", str(out), "--fit-range", "10", "1000"])
    report = _read_json(out / "classification_r.json")
    assert report["fit"]["x_max"] == 1000
    assert report["fit"]["points_used"] > 15


def test_project_consistent_headline_arithmetic(tmp_path):
    runs, manifests = [], []
    for alpha, size in [(1.5, 10**9), (1.7, 10**10), (1.9, 10**11)]:
        tag = f"s{size}"
        runs.append(str(_write_run(tmp_path / f"{tag}.jsonl", alpha)))
        manifests.append(str(_write_manifest(tmp_path / f"{tag}.json", tag, size)))
    out = tmp_path / "out"
    argv = ["project"] + runs
    for m in manifests:
        argv += ["--manifest", m]
    assert main(argv + ["--out", str(out)]) == EXIT_OK
    bundle = _read_json(out / "projection_report.json")
    projection = bundle["projection"]
    assert projection["non_extrapolable"] is False
    assert projection["extrapolation"] == "optimistic"
    required = projection["required_params"]
    assert required > 1e12
    # the reported line inverts back to the target at the required size
    implied = 10.0 ** (projection["intercept"] + projection["slope"] * math.log10(required))
    assert implied == pytest.approx(projection["target_alpha"], rel=1e-9)
    # headline figures follow from the stated assumptions
    hw = projection["assumptions"]
    assert projection["years_until"] == pytest.approx(
        (hw["doubling_months"] / 12.0) * math.log2(required / hw["current_max_params"])
    )
    assert projection["gpu_count"] == pytest.approx(required * hw["bytes_per_param"] / hw["gpu_memory_bytes"])
    assert projection["cost_ratio"] == pytest.approx(
        projection["gpu_count"] * hw["gpu_unit_cost"] / hw["reference_market_cap"]
    )
    assert projection["neuron_ratio"] == pytest.approx(required / 1e21)
    assert (out / "plot_scaling.csv").exists()


def test_project_falling_trend_reports_non_extrapolable(tmp_path):
    runs, manifests = [], []
    for alpha, size in [(2.4, 10**9), (1.5, 10**11)]:
        tag = f"s{size}"
        runs.append(str(_write_run(tmp_path / f"{tag}.jsonl", alpha)))
        manifests.append(str(_write_manifest(tmp_path / f"{tag}.json", tag, size)))
    out = tmp_path / "out"
    argv = ["project"] + runs
    for m in manifests:
        argv += ["--manifest", m]
    assert main(argv + ["--out", str(out)]) == EXIT_OK
    projection = _read_json(out / "projection_report.json")["projection"]
    assert projection["non_extrapolable"] is True
    assert projection["slope"] < 0


def test_project_needs_two_sizes(tmp_path):
    run = _write_run(tmp_path / "r.jsonl", 2.0)
    manifest = _write_manifest(tmp_path / "m.json", "r", 10**9)
    out = tmp_path / "out"
    code = main(["project", str(run), "--manifest", str(manifest), "--out", str(out)])
    assert code == EXIT_TOTAL_FAILURE
    assert _read_json(out / "projection_report.json")["projection"] is None


def test_sandpile_single_run(tmp_path):
    out = tmp_path / "out"
    code = main([
        "sandpile", "--dim", "2", "--side", "8", "--drives", "400",
        "--burn-in", "600", "--emit-distribution", "--out", str(out),
    ])
    assert code == EXIT_OK
    sizes = (out / "avalanche_sizes_dim2_side8.txt").read_text().splitlines()
    assert len(sizes) == 400
    assert all(int(s) >= 0 for s in sizes)
    assert (out / "distribution_dim2_side8.csv").exists()
    meta = _read_json(out / "sandpile_dim2_side8.json")
    assert meta["conservation"]["exact"] is True
    assert meta["threshold"] == 4
    assert _read_json(out / "sandpile_report.json")["simulations"][0]["dimension"] == 2


def test_sandpile_sweep_runs_all_dims(tmp_path):
    out = tmp_path / "out"
    code = main([
        "sandpile", "--dim", "1", "--dim", "2", "--side", "6",
        "--drives", "200", "--burn-in", "200", "--out", str(out),
    ])
    assert code == EXIT_OK
    report = _read_json(out / "sandpile_report.json")
    assert [s["dimension"] for s in report["simulations"]] == [1, 2]
    # sweep entries use consecutive seeds so the streams are independent
    assert [s["rng_seed"] for s in report["simulations"]] == [0, 1]


def test_sandpile_deterministic(tmp_path):
    args = ["sandpile", "--dim", "2", "--side", "8", "--drives", "300", "--burn-in", "400"]
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    main(args + ["--out", str(out_a)])
    main(args + ["--out", str(out_b)])
    name = "avalanche_sizes_dim2_side8.txt"
    assert (out_a / name).read_bytes() == (out_b / name).read_bytes()


def test_check_scale_invariance(tmp_path):
    run = _write_run(tmp_path / "r.jsonl", 2.5)
    out = tmp_path / "out"
    code = main(["check-scale-invariance", str(run), "--k", "2", "--k", "7", "--out", str(out)])
    assert code == EXIT_OK
    checks = _read_json(out / "invariance_report.json")["checks"]
    assert [c["k"] for c in checks] == [2, 7]
    for check in checks:
        assert check["delta"] < 0.05
        assert check["levels_match"] is True


def test_report_full_pipeline(tmp_path):
    runs, manifests = [], []
    for alpha, size in [(1.6, 10**9), (2.1, 10**10), (2.6, 10**11)]:
        tag = f"s{size}"
        runs.append(str(_write_run(tmp_path / f"{tag}.jsonl", alpha)))
        manifests.append(str(_write_manifest(tmp_path / f"{tag}.json", tag, size)))
    out = tmp_path / "out"
    argv = ["report"] + runs
    for m in manifests:
        argv += ["--manifest", m]
    assert main(argv + ["--out", str(out)]) == EXIT_OK
    report = _read_json(out / "report.json")
    assert len(report["classifications"]) == 3
    levels = {c["run_id"]: c["level"] for c in report["classifications"]}
    assert levels["s1000000000"] == "Limited"
    assert levels["s10000000000"] == "Capable"
    assert len(report["invariance"]) == 3
    assert report["projection"]["non_extrapolable"] is False
    assert report["errors"] == []
    assert report["plot_files"]
    assert report["provenance"]["version"]
    # every defaulted assumption that shaped a number is stated
    assumptions = report["provenance"]["assumptions"]
    assert assumptions["fit_range"] == [10, 100]
    assert assumptions["bins_per_decade"] == 10
    assert assumptions["level_boundaries"] == [2.0, 3.0]
    assert assumptions["target_alpha"] == 3.0
    for key in ("bytes_per_param", "gpu_memory_bytes", "gpu_unit_cost",
                "reference_market_cap", "doubling_months", "current_max_params"):
        assert key in assumptions


def test_report_without_sizes_omits_projection(tmp_path):
    run = _write_run(tmp_path / "r.jsonl", 2.0)
    out = tmp_path / "out"
    assert main(["report", str(run), "--out", str(out)]) == EXIT_OK
    report = _read_json(out / "report.json")
    assert report["projection"] is None
    assert report["projection_notes"]
    assert len(report["classifications"]) == 1


def test_report_byte_identical_on_rerun(tmp_path):
    run = _write_run(tmp_path / "r.jsonl", 2.3)
    out = tmp_path / "out"
    argv = ["report", str(run), "--out", str(out), "--format", "svg"]
    assert main(argv) == EXIT_OK
    snapshot = {p.name: p.read_bytes() for p in out.iterdir()}
    assert main(argv) == EXIT_OK
    again = {p.name: p.read_bytes() for p in out.iterdir()}
    assert snapshot == again
    assert "report.json" in snapshot and "plot_r.svg" in snapshot


def test_usage_errors_exit_one():
    with pytest.raises(SystemExit) as exc_info:
        main([])
    assert exc_info.value.code == EXIT_TOTAL_FAILURE
    with pytest.raises(SystemExit) as exc_info:
        main(["not-a-command"])
    assert exc_info.value.code == EXIT_TOTAL_FAILURE
    with pytest.raises(SystemExit) as exc_info:
        main(["classify", "--format", "gif", "x.jsonl"])
    assert exc_info.value.code == EXIT_TOTAL_FAILURE


def test_module_entry_point_runs():
    proc = subprocess.run(
        [sys.executable, "-m", "failtail.cli", "--version"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout.startswith("failtail ")
