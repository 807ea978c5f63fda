"""Failure counting over scored candidate sets.

The failure count of an instance is the number of candidates the subject
scored strictly above the reference answer, which equals the reference's
rank minus one when candidates are ordered by descending score with ties
resolved in the subject's favor. It depends only on the ordering of the
scores, so any strictly increasing transform of the scores leaves it
unchanged. An optional pessimistic mode counts exact ties against the
subject instead, for sensitivity analysis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = ["ScoredCandidates", "failure_count"]


@dataclass(frozen=True)
class ScoredCandidates:
    """One real score per candidate plus the reference answer's index."""

    scores: tuple[float, ...]
    reference_index: int

    def __post_init__(self) -> None:
        scores = tuple(float(s) for s in self.scores)
        object.__setattr__(self, "scores", scores)
        if not scores:
            raise ValueError("scores must be non-empty")
        if any(math.isnan(s) for s in scores):
            raise ValueError("scores must not contain NaN")
        ref = self.reference_index
        if not isinstance(ref, int) or isinstance(ref, bool):
            raise TypeError(f"reference_index must be an integer, got {ref!r}")
        if not 0 <= ref < len(scores):
            raise ValueError(
                f"reference_index {ref} out of range for {len(scores)} candidates"
            )


def failure_count(cands: ScoredCandidates, pessimistic_ties: bool = False) -> int:
    """Count candidates ranked above the reference.

    The default convention is strict: a candidate tied with the reference's
    score is not a failure. With ``pessimistic_ties`` every other candidate
    scoring greater than or equal to the reference counts.
    """
    reference_score = cands.scores[cands.reference_index]
    if pessimistic_ties:
        return sum(
            1
            for i, s in enumerate(cands.scores)
            if i != cands.reference_index and s >= reference_score
        )
    return sum(1 for s in cands.scores if s > reference_score)
