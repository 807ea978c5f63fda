"""Turn model scores into failure-count records.

A subject model assigns a score to every candidate answer for a task
instance; the failure count is how many candidates it ranks strictly above
the reference answer. This package computes those counts from deterministic
offline models (and from any scoring adapter implementing the small model
interface) and writes them in the JSONL record and manifest formats the
companion analysis toolkit ingests directly.
"""

from failrank.datasets import DatasetError, bundled_dataset_names, resolve_dataset
from failrank.extract import (
    ExtractedRecord,
    ExtractionJob,
    ExtractionResult,
    JobError,
    extract_run,
    write_result,
)
from failrank.models import (
    TASK_KINDS,
    BigramModel,
    OracleModel,
    ReversedIndexModel,
    ScoringModel,
    UnknownModelError,
    resolve_model,
)
from failrank.ranking import ScoredCandidates, failure_count

__version__ = "0.1.0"

__all__ = [
    "ScoredCandidates",
    "failure_count",
    "ScoringModel",
    "OracleModel",
    "ReversedIndexModel",
    "BigramModel",
    "resolve_model",
    "UnknownModelError",
    "TASK_KINDS",
    "ExtractionJob",
    "ExtractedRecord",
    "ExtractionResult",
    "JobError",
    "extract_run",
    "write_result",
    "DatasetError",
    "resolve_dataset",
    "bundled_dataset_names",
    "__version__",
]
