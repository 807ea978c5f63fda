"""Score a dataset with a model and emit failure-count records.

Each evaluated instance yields one record: for next-token jobs one per
predicted token position (positions whose conditioning prefix is shorter
than the job's minimum are skipped), for candidate-set jobs one per row.
Records are emitted in dataset order, so identical jobs produce identical
output bytes.

The on-disk formats match the analysis toolkit's ingestion contract exactly.
The record file is JSONL with one object per line holding ``instance_id``
and a non-negative integer ``failure_count`` (readers default ``weight`` to
one, so extraction never writes it). The manifest is a JSON object with
exactly the keys run_id, subject_name, param_count, task, dataset, shots,
and seed; nothing else is accepted on the analysis side, so the token
granularity of next-token runs is folded into the task string.

Per-instance scoring problems (a token missing from the model's vocabulary,
a model exception, a malformed dataset row) are logged with the instance's
identity and do not abort the run; only an unusable model or dataset does.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from failrank.datasets import load_candidate_rows, load_documents, resolve_dataset
from failrank.models import TASK_KINDS, ScoringModel, resolve_model
from failrank.ranking import ScoredCandidates, failure_count

__all__ = [
    "DEFAULT_PREFIX_MIN_LENGTH",
    "ExtractionJob",
    "ExtractedRecord",
    "ExtractionResult",
    "JobError",
    "extract_run",
    "write_result",
]

DEFAULT_PREFIX_MIN_LENGTH = 1000


class JobError(RuntimeError):
    """The model or dataset cannot be used at all; no records were produced."""


@dataclass(frozen=True)
class ExtractionJob:
    """What to score: a model, a dataset, and the task shape.

    ``prefix_min_length`` applies only to next-token jobs and defaults to
    1000 conditioning tokens (prepended shot documents count toward it);
    setting it on any other task kind is an error. ``shots`` leading
    documents (or rows) are held out of extraction and, for next-token jobs,
    prepended verbatim as conditioning context.
    """

    task_kind: str
    model: str | ScoringModel
    dataset: str | Path
    prefix_min_length: int | None = None
    shots: int = 0
    pessimistic_ties: bool = False
    run_id: str | None = None

    def __post_init__(self) -> None:
        if self.task_kind not in TASK_KINDS:
            raise ValueError(
                f"task_kind must be one of {', '.join(TASK_KINDS)}; got {self.task_kind!r}"
            )
        if not isinstance(self.shots, int) or isinstance(self.shots, bool) or self.shots < 0:
            raise ValueError(f"shots must be a non-negative integer, got {self.shots!r}")
        if self.prefix_min_length is not None:
            length = self.prefix_min_length
            if not isinstance(length, int) or isinstance(length, bool) or length < 0:
                raise ValueError(
                    f"prefix_min_length must be a non-negative integer, got {length!r}"
                )
            if self.task_kind != "next-token":
                raise ValueError("prefix_min_length applies only to next-token jobs")
        if self.run_id is not None:
            if not self.run_id or any(c in self.run_id for c in ("/", "\\", "\x00")):
                raise ValueError(
                    f"run_id must be a non-empty name without path separators, got {self.run_id!r}"
                )

    @property
    def min_prefix(self) -> int | None:
        """Effective prefix floor: the default for next-token, else None."""
        if self.task_kind != "next-token":
            return None
        if self.prefix_min_length is None:
            return DEFAULT_PREFIX_MIN_LENGTH
        return self.prefix_min_length


@dataclass(frozen=True)
class ExtractedRecord:
    """One scored instance."""

    instance_id: str
    failure_count: int


@dataclass(frozen=True)
class ExtractionResult:
    """Everything one job produced: records, manifest, and the error log."""

    records: tuple[ExtractedRecord, ...]
    manifest: dict
    errors: tuple[tuple[str, str], ...]
    skipped: int
    instances_seen: int


def extract_run(job: ExtractionJob) -> ExtractionResult:
    """Run one extraction job to completion."""
    try:
        path = resolve_dataset(job.dataset)
    except ValueError as exc:
        raise JobError(str(exc)) from exc
    if job.task_kind == "next-token":
        return _extract_next_token(job, path)
    return _extract_candidate_rows(job, path)


def _score_instance(
    model: ScoringModel,
    context: Sequence[str],
    candidates: Sequence[str],
    reference_index: int,
    pessimistic: bool,
) -> int:
    scores = model.score(context, candidates, reference_index)
    if len(scores) != len(candidates):
        raise ValueError(
            f"model returned {len(scores)} scores for {len(candidates)} candidates"
        )
    return failure_count(
        ScoredCandidates(tuple(scores), reference_index), pessimistic_ties=pessimistic
    )


def _extract_next_token(job: ExtractionJob, path: Path) -> ExtractionResult:
    try:
        documents = load_documents(path)
    except ValueError as exc:
        raise JobError(str(exc)) from exc
    if job.shots >= len(documents):
        raise JobError(
            f"shots={job.shots} leaves no documents to score "
            f"(dataset has {len(documents)})"
        )
    try:
        model = resolve_model(job.model, job.task_kind, [d.tokens for d in documents])
    except ValueError as exc:
        raise JobError(str(exc)) from exc
    vocab = model.vocabulary()
    if vocab is None:
        vocab = tuple(sorted({t for d in documents for t in d.tokens}))
    vocab_index = {token: i for i, token in enumerate(vocab)}

    shot_tokens: tuple[str, ...] = tuple(
        t for d in documents[: job.shots] for t in d.tokens
    )
    records: list[ExtractedRecord] = []
    errors: list[tuple[str, str]] = []
    skipped = 0
    seen = 0
    for document in documents[job.shots :]:
        tokens = document.tokens
        for position in range(1, len(tokens)):
            seen += 1
            if len(shot_tokens) + position < job.min_prefix:
                skipped += 1
                continue
            instance_id = f"{document.doc_id}:{position}"
            try:
                reference = vocab_index.get(tokens[position])
                if reference is None:
                    raise ValueError(
                        f"token {tokens[position]!r} not in model vocabulary"
                    )
                count = _score_instance(
                    model,
                    shot_tokens + tokens[:position],
                    vocab,
                    reference,
                    job.pessimistic_ties,
                )
            except Exception as exc:
                errors.append((instance_id, str(exc)))
                continue
            records.append(ExtractedRecord(instance_id, count))
    manifest = _manifest(job, model, path)
    return ExtractionResult(tuple(records), manifest, tuple(errors), skipped, seen)


def _extract_candidate_rows(job: ExtractionJob, path: Path) -> ExtractionResult:
    try:
        rows, rejects = load_candidate_rows(path)
    except ValueError as exc:
        raise JobError(str(exc)) from exc
    if not rows:
        raise JobError(f"{path} has no usable rows ({len(rejects)} malformed)")
    if job.shots >= len(rows):
        raise JobError(
            f"shots={job.shots} leaves no rows to score (dataset has {len(rows)})"
        )
    try:
        model = resolve_model(job.model, job.task_kind)
    except ValueError as exc:
        raise JobError(str(exc)) from exc
    records: list[ExtractedRecord] = []
    errors: list[tuple[str, str]] = list(rejects)
    seen = 0
    for row in rows[job.shots :]:
        seen += 1
        try:
            count = _score_instance(
                model,
                tuple(row.query.split()),
                row.candidates,
                row.reference_index,
                job.pessimistic_ties,
            )
        except Exception as exc:
            errors.append((row.instance_id, str(exc)))
            continue
        records.append(ExtractedRecord(row.instance_id, count))
    manifest = _manifest(job, model, path)
    return ExtractionResult(tuple(records), manifest, tuple(errors), 0, seen)


def _manifest(job: ExtractionJob, model: ScoringModel, path: Path) -> dict:
    task = job.task_kind
    if job.task_kind == "next-token" and model.token_level:
        task = f"{job.task_kind} ({model.token_level} tokens)"
    run_id = job.run_id or f"{model.name}-{path.stem}-{job.task_kind}"
    return {
        "run_id": run_id,
        "subject_name": model.name,
        "param_count": model.param_count,
        "task": task,
        "dataset": str(job.dataset),
        "shots": job.shots,
        "seed": None,
    }


def write_result(result: ExtractionResult, out_dir: str | Path) -> dict[str, Path]:
    """Write records, manifest, and the extraction log into ``out_dir``.

    Returns the paths keyed by role. The record and manifest files are byte
    deterministic for identical results.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    run_id = result.manifest["run_id"]
    records_path = out / f"{run_id}.jsonl"
    lines = [
        json.dumps(
            {"failure_count": r.failure_count, "instance_id": r.instance_id},
            sort_keys=True,
        )
        for r in result.records
    ]
    records_path.write_bytes(
        ("\n".join(lines) + "\n" if lines else "").encode("utf-8")
    )
    manifest_path = out / f"{run_id}.manifest.json"
    manifest_path.write_bytes(
        (json.dumps(result.manifest, sort_keys=True, indent=2) + "\n").encode("utf-8")
    )
    log_path = out / f"{run_id}.extraction.json"
    log = {
        "run_id": run_id,
        "records": len(result.records),
        "instances_seen": result.instances_seen,
        "skipped": result.skipped,
        "errors": [list(e) for e in result.errors],
    }
    log_path.write_bytes(
        (json.dumps(log, sort_keys=True, indent=2) + "\n").encode("utf-8")
    )
    return {"records": records_path, "manifest": manifest_path, "log": log_path}
