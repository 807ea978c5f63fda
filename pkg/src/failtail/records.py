"""Data model, ingestion, and persistence for failure-count evaluation runs.

A run is a sequence of records, one per evaluated instance, each carrying the
number of wrong attempts the subject made before producing the reference
answer. Records stream through line-oriented formats (JSONL, CSV) so large
runs never need full materialization, and a :class:`RunStore` keys record
sequences by run manifest for downstream analysis.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import BinaryIO, Iterable, Iterator, Mapping, Sequence

__all__ = [
    "FailureRecord",
    "RunManifest",
    "RunStore",
    "IngestError",
    "DuplicateRunError",
    "IngestResult",
    "ingest_records",
    "serialize_records",
    "load_manifest",
    "save_manifest",
]

_RESERVED_FIELDS = ("instance_id", "failure_count", "weight")


class IngestError(ValueError):
    """A malformed input line that cannot be parsed into a record."""

    def __init__(self, line_number: int, reason: str):
        self.line_number = line_number
        self.reason = reason
        super().__init__(f"line {line_number}: {reason}")


class DuplicateRunError(ValueError):
    """A run_id registered twice in the same store."""


@dataclass(frozen=True)
class FailureRecord:
    """One evaluated instance: how many wrong attempts preceded the answer.

    ``failure_count`` is dimensionless and non-negative; a zero means the
    subject was right on the first try. ``weight`` scales the record's
    contribution to empirical distributions and defaults to 1. ``extra``
    holds unknown JSONL fields so round trips preserve them; it never
    influences analysis.
    """

    instance_id: str
    failure_count: int
    weight: float = 1.0
    extra: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not isinstance(self.failure_count, int) or isinstance(self.failure_count, bool):
            raise TypeError(f"failure_count must be an integer, got {self.failure_count!r}")
        if self.failure_count < 0:
            raise ValueError(f"failure_count must be >= 0, got {self.failure_count}")
        if not self.weight > 0:
            raise ValueError(f"weight must be > 0, got {self.weight}")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FailureRecord):
            return NotImplemented
        return (
            self.instance_id == other.instance_id
            and self.failure_count == other.failure_count
            and self.weight == other.weight
            and dict(self.extra) == dict(other.extra)
        )

    def __hash__(self) -> int:
        return hash((self.instance_id, self.failure_count, self.weight))


@dataclass(frozen=True)
class RunManifest:
    """Metadata for one evaluation run.

    ``param_count`` is the subject's parameter count when known; it feeds the
    scaling analysis. ``shots`` and ``seed`` are recorded for reproducibility
    and may be absent.
    """

    run_id: str
    subject_name: str = ""
    param_count: int | None = None
    task: str = ""
    dataset: str = ""
    shots: int | None = None
    seed: int | None = None

    def __post_init__(self) -> None:
        if not self.run_id:
            raise ValueError("run_id must be non-empty")
        if self.param_count is not None:
            if not isinstance(self.param_count, int) or isinstance(self.param_count, bool):
                raise TypeError(f"param_count must be an integer, got {self.param_count!r}")
            if self.param_count <= 0:
                raise ValueError(f"param_count must be > 0, got {self.param_count}")
        if self.shots is not None and self.shots < 0:
            raise ValueError(f"shots must be >= 0, got {self.shots}")


class RunStore:
    """Single-writer, multi-reader collection of runs keyed by run_id."""

    def __init__(self) -> None:
        self._manifests: dict[str, RunManifest] = {}
        self._records: dict[str, tuple[FailureRecord, ...]] = {}

    @property
    def manifests(self) -> tuple[RunManifest, ...]:
        return tuple(self._manifests.values())

    def run_ids(self) -> tuple[str, ...]:
        return tuple(self._manifests)

    def manifest(self, run_id: str) -> RunManifest:
        return self._manifests[run_id]

    def records(self, run_id: str) -> tuple[FailureRecord, ...]:
        return self._records[run_id]

    def __contains__(self, run_id: str) -> bool:
        return run_id in self._manifests

    def __len__(self) -> int:
        return len(self._manifests)


def register_run(
    store: RunStore,
    manifest: RunManifest,
    records: Sequence[FailureRecord],
) -> RunStore:
    """Add a run to the store; the manifest's run_id must be new.

    Returns the same store to allow chaining. An empty record sequence is an
    error because every run must carry data.
    """
    if manifest.run_id in store:
        raise DuplicateRunError(f"run_id {manifest.run_id!r} already registered")
    records = tuple(records)
    if not records:
        raise ValueError(f"run {manifest.run_id!r} has no records")
    store._manifests[manifest.run_id] = manifest
    store._records[manifest.run_id] = records
    return store


class IngestResult(Sequence[FailureRecord]):
    """Accepted records plus line-numbered rejects from one ingestion pass.

    Behaves as a sequence of the accepted records. ``rejects`` lists
    ``(line_number, reason)`` pairs for rows that parsed but violated a
    record invariant; ``total_rows`` counts every input row, so
    ``len(result) + len(result.rejects) == result.total_rows``.
    """

    def __init__(self, records: list[FailureRecord], rejects: list[tuple[int, str]], total_rows: int):
        self.rejects = tuple(rejects)
        self.total_rows = total_rows
        self._records = tuple(records)

    @property
    def records(self) -> tuple[FailureRecord, ...]:
        return self._records

    def __len__(self) -> int:
        return len(self._records)

    def __getitem__(self, index):  # type: ignore[override]
        return self._records[index]

    def __iter__(self) -> Iterator[FailureRecord]:
        return iter(self._records)


def _coerce_count(value: object) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise TypeError(f"failure_count must be an integer, got {value!r}")
    return value


def _record_from_object(obj: Mapping[str, object]) -> FailureRecord:
    """Build a record from one parsed JSONL object, keeping unknown fields."""
    if "instance_id" not in obj:
        raise KeyError("missing field instance_id")
    if "failure_count" not in obj:
        raise KeyError("missing field failure_count")
    instance_id = obj["instance_id"]
    if not isinstance(instance_id, str):
        raise TypeError(f"instance_id must be a string, got {instance_id!r}")
    count = _coerce_count(obj["failure_count"])
    weight = obj.get("weight", 1.0)
    if isinstance(weight, bool) or not isinstance(weight, (int, float)):
        raise TypeError(f"weight must be a number, got {weight!r}")
    extra = {k: v for k, v in obj.items() if k not in _RESERVED_FIELDS}
    return FailureRecord(instance_id, count, float(weight), extra)


class _Reject:
    """Internal marker: row parsed but violated a record invariant."""

    def __init__(self, reason: str):
        self.reason = reason


def _iter_jsonl(lines: Iterable[tuple[int, str]]):
    # Structural problems (bad JSON, missing fields, wrong types) abort
    # ingestion with the offending line number; value-range violations become
    # rejects so the rest of the stream still loads.
    for number, line in lines:
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise IngestError(number, f"invalid JSON ({exc.msg})") from exc
        if not isinstance(obj, dict):
            raise IngestError(number, "expected a JSON object")
        try:
            record = _record_from_object(obj)
        except (KeyError, TypeError) as exc:
            raise IngestError(number, str(exc).strip("'\"")) from exc
        except ValueError as exc:
            yield number, _Reject(str(exc))
            continue
        yield number, record


def _iter_csv(lines: Iterable[tuple[int, str]]):
    numbered = list(lines)
    if not numbered:
        return
    header_number, header_line = numbered[0]
    header = next(csv.reader([header_line]))
    header = [h.strip() for h in header]
    if header not in (["instance_id", "failure_count"], ["instance_id", "failure_count", "weight"]):
        raise IngestError(header_number, f"unrecognized CSV header {header!r}")
    has_weight = len(header) == 3
    for number, line in numbered[1:]:
        if not line.strip():
            continue
        row = next(csv.reader([line]))
        if len(row) != len(header):
            raise IngestError(number, f"expected {len(header)} columns, got {len(row)}")
        try:
            count = int(row[1])
        except ValueError as exc:
            raise IngestError(number, f"failure_count is not an integer: {row[1]!r}") from exc
        if has_weight:
            try:
                weight = float(row[2])
            except ValueError as exc:
                raise IngestError(number, f"weight is not a number: {row[2]!r}") from exc
        else:
            weight = 1.0
        try:
            record = FailureRecord(row[0], count, weight)
        except ValueError as exc:
            yield number, _Reject(str(exc))
            continue
        yield number, record


def _numbered_lines(source) -> Iterator[tuple[int, str]]:
    if isinstance(source, (str, Path)):
        with open(source, "rb") as handle:
            yield from _numbered_lines(handle)
        return
    if isinstance(source, bytes):
        source = io.BytesIO(source)
    for number, raw in enumerate(source, start=1):
        if isinstance(raw, bytes):
            try:
                yield number, raw.decode("utf-8")
            except UnicodeDecodeError as exc:
                raise IngestError(number, "not valid UTF-8") from exc
        else:
            yield number, raw


def ingest_records(source, format: str = "jsonl") -> IngestResult:
    """Parse a byte stream, file path, or bytes object into failure records.

    Rows stream one at a time; order is preserved. Malformed rows raise
    :class:`IngestError` with their line number. Rows that parse but violate
    a record invariant (negative count, non-positive weight) are collected as
    rejects, never silently dropped.
    """
    if format not in ("jsonl", "csv"):
        raise ValueError(f"unknown format {format!r}")
    parse = _iter_jsonl if format == "jsonl" else _iter_csv
    records: list[FailureRecord] = []
    rejects: list[tuple[int, str]] = []
    total = 0
    for number, item in parse(_numbered_lines(source)):
        total += 1
        if isinstance(item, _Reject):
            rejects.append((number, item.reason))
        else:
            records.append(item)
    return IngestResult(records, rejects, total)


def serialize_records(records: Iterable[FailureRecord], format: str = "jsonl") -> bytes:
    """Render records back to JSONL or CSV bytes.

    JSONL keeps unknown fields and omits a weight of exactly 1, so
    ``ingest_records(serialize_records(rs))`` reproduces ``rs`` field for
    field. CSV carries the weight column only when some record needs it;
    instance ids holding NUL or line breaks cannot survive the line-based
    CSV reader and are rejected (use JSONL for those).
    """
    if format == "jsonl":
        lines = []
        for record in records:
            obj: dict[str, object] = {
                "instance_id": record.instance_id,
                "failure_count": record.failure_count,
            }
            if record.weight != 1.0:
                obj["weight"] = record.weight
            obj.update(record.extra)
            lines.append(json.dumps(obj, sort_keys=True))
        return ("\n".join(lines) + "\n" if lines else "").encode("utf-8")
    if format == "csv":
        records = list(records)
        has_weight = any(r.weight != 1.0 for r in records)
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["instance_id", "failure_count", "weight"] if has_weight else ["instance_id", "failure_count"])
        for record in records:
            if any(c in record.instance_id for c in ("\x00", "\r", "\n")):
                raise ValueError(
                    f"instance_id {record.instance_id!r} cannot be written as CSV; use jsonl"
                )
            row = [record.instance_id, str(record.failure_count)]
            if has_weight:
                row.append(repr(record.weight))
            writer.writerow(row)
        return out.getvalue().encode("utf-8")
    raise ValueError(f"unknown format {format!r}")


_MANIFEST_FIELDS = ("run_id", "subject_name", "param_count", "task", "dataset", "shots", "seed")


def load_manifest(source) -> RunManifest:
    """Read a run manifest from a JSON file path, stream, or bytes.

    ``param_count`` must be a JSON integer; floats (including scientific
    notation, which JSON parses as float) and strings are rejected so that
    parameter counts never lose precision.
    """
    if isinstance(source, (str, Path)):
        raw = Path(source).read_bytes()
    elif isinstance(source, bytes):
        raw = source
    else:
        raw = source.read()
        if isinstance(raw, str):
            raw = raw.encode("utf-8")
    obj = json.loads(raw.decode("utf-8"))
    if not isinstance(obj, dict):
        raise ValueError("manifest must be a JSON object")
    unknown = sorted(set(obj) - set(_MANIFEST_FIELDS))
    if unknown:
        raise ValueError(f"unknown manifest fields: {', '.join(unknown)}")
    if "run_id" not in obj:
        raise ValueError("manifest missing run_id")
    kwargs = {k: obj[k] for k in _MANIFEST_FIELDS if k in obj and obj[k] is not None}
    return RunManifest(**kwargs)


def save_manifest(manifest: RunManifest, path) -> None:
    obj = {
        "run_id": manifest.run_id,
        "subject_name": manifest.subject_name,
        "param_count": manifest.param_count,
        "task": manifest.task,
        "dataset": manifest.dataset,
        "shots": manifest.shots,
        "seed": manifest.seed,
    }
    Path(path).write_bytes((json.dumps(obj, sort_keys=True, indent=2) + "\n").encode("utf-8"))
