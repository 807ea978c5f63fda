"""Dataset loading for extraction jobs.

Next-token datasets are plain text files with documents separated by blank
lines; tokens are whitespace-delimited. Candidate datasets (classification,
retrieval, recommendation) are JSONL, one instance per line:

    {"instance_id": "q1", "query": "...", "candidates": [...],
     "reference_index": 2}

``instance_id`` defaults to the line position and ``query`` to empty.
A malformed line is reported with its line number and skipped; only a file
with no usable content at all fails the job. A small bundled corpus named
``tiny-corpus`` (ten documents) ships with the package for offline runs.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

__all__ = [
    "Document",
    "CandidateRow",
    "DatasetError",
    "resolve_dataset",
    "bundled_dataset_names",
    "load_documents",
    "load_candidate_rows",
]

_BUNDLED = {"tiny-corpus": "tiny_corpus.txt"}


class DatasetError(ValueError):
    """A dataset that cannot be located or holds no usable instances."""


@dataclass(frozen=True)
class Document:
    """One tokenized document of a next-token dataset."""

    doc_id: str
    tokens: tuple[str, ...]


@dataclass(frozen=True)
class CandidateRow:
    """One candidate-set instance of a classification-shaped dataset."""

    instance_id: str
    candidates: tuple[str, ...]
    reference_index: int
    query: str = ""


def bundled_dataset_names() -> tuple[str, ...]:
    return tuple(sorted(_BUNDLED))


def resolve_dataset(source: str | Path) -> Path:
    """Map a bundled dataset name or a file path to a readable path."""
    name = str(source)
    if name in _BUNDLED:
        path = Path(str(resources.files("failrank").joinpath("data", _BUNDLED[name])))
        if path.is_file():
            return path
        raise DatasetError(f"bundled dataset {name!r} is missing from the install")
    path = Path(source)
    if path.is_file():
        return path
    raise DatasetError(
        f"dataset {name!r} is neither a bundled name ({', '.join(bundled_dataset_names())}) "
        f"nor a readable file"
    )


def load_documents(path: Path) -> tuple[Document, ...]:
    """Read a blank-line-separated document corpus."""
    text = Path(path).read_text(encoding="utf-8")
    documents = []
    for block in re.split(r"\n\s*\n", text):
        tokens = tuple(block.split())
        if tokens:
            documents.append(Document(f"doc{len(documents) + 1:02d}", tokens))
    if not documents:
        raise DatasetError(f"{path} contains no documents")
    return tuple(documents)


def load_candidate_rows(
    path: Path,
) -> tuple[tuple[CandidateRow, ...], tuple[tuple[str, str], ...]]:
    """Read candidate-set rows, returning (rows, line-numbered rejects)."""
    rows: list[CandidateRow] = []
    rejects: list[tuple[str, str]] = []
    path = Path(path)
    with open(path, encoding="utf-8") as handle:
        for line_number, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                rows.append(_parse_row(line, line_number))
            except ValueError as exc:
                rejects.append((f"{path.name}:{line_number}", str(exc)))
    if not rows and not rejects:
        raise DatasetError(f"{path} contains no instances")
    return tuple(rows), tuple(rejects)


def _parse_row(line: str, line_number: int) -> CandidateRow:
    obj = json.loads(line)
    if not isinstance(obj, dict):
        raise ValueError("row must be a JSON object")
    candidates = obj.get("candidates")
    if not isinstance(candidates, list) or not candidates:
        raise ValueError("candidates must be a non-empty list")
    reference = obj.get("reference_index")
    if not isinstance(reference, int) or isinstance(reference, bool):
        raise ValueError(f"reference_index must be an integer, got {reference!r}")
    if not 0 <= reference < len(candidates):
        raise ValueError(
            f"reference_index {reference} out of range for {len(candidates)} candidates"
        )
    instance_id = obj.get("instance_id", f"row{line_number}")
    if not isinstance(instance_id, str) or not instance_id:
        raise ValueError(f"instance_id must be a non-empty string, got {instance_id!r}")
    query = obj.get("query", "")
    if not isinstance(query, str):
        raise ValueError(f"query must be a string, got {query!r}")
    return CandidateRow(
        instance_id=instance_id,
        candidates=tuple(str(c) for c in candidates),
        reference_index=reference,
        query=query,
    )
