"""Deterministic offline scoring models.

A model receives the full instance (conditioning context, candidate list,
and the reference answer's index) and returns one real score per candidate.
The reference index is passed so that constructed test subjects can place
the reference deliberately; adapters wrapping real subjects must ignore it.
Everything here runs without network access or stored weights.

Builtin models:

- ``oracle``    always scores the reference highest, so every failure count
                is zero.
- ``reversed``  scores each candidate by its list index, preferring the last
                candidate, so the reference's failure count is its distance
                from the last position.
- ``bigram``    an add-one-smoothed bigram language model over whitespace
                tokens, fitted to the extraction corpus itself; scoring a
                run with it measures how well the corpus text is memorized.
                Next-token jobs only.
"""

from __future__ import annotations

from collections import Counter
from typing import Iterable, Sequence

__all__ = [
    "TASK_KINDS",
    "ScoringModel",
    "OracleModel",
    "ReversedIndexModel",
    "BigramModel",
    "UnknownModelError",
    "resolve_model",
]

TASK_KINDS = ("next-token", "classification", "retrieval", "recommendation")


class UnknownModelError(ValueError):
    """A model name not present in the builtin registry."""


class ScoringModel:
    """Interface every subject adapter implements.

    ``param_count`` is the subject's parameter count when it has one (it
    feeds the run manifest; parameterless stubs report None). ``token_level``
    names the candidate granularity of next-token scoring, recorded in the
    manifest task description. ``task_kinds`` lists the job kinds the model
    can score. ``vocabulary`` returns the model's native candidate set for
    next-token jobs, or None to score over the dataset's own vocabulary.
    """

    name: str = ""
    param_count: int | None = None
    token_level: str | None = None
    task_kinds: frozenset[str] = frozenset(TASK_KINDS)

    def score(
        self,
        context: Sequence[str],
        candidates: Sequence[str],
        reference_index: int,
    ) -> Sequence[float]:
        raise NotImplementedError

    def vocabulary(self) -> tuple[str, ...] | None:
        return None


class OracleModel(ScoringModel):
    """Scores the reference highest everywhere."""

    name = "oracle"

    def score(self, context, candidates, reference_index):
        return [1.0 if i == reference_index else 0.0 for i in range(len(candidates))]


class ReversedIndexModel(ScoringModel):
    """Prefers candidates near the end of the list.

    Score equals the candidate's index, so the reference is out-ranked by
    exactly the candidates after it: failure count = last index - reference.
    """

    name = "reversed"

    def score(self, context, candidates, reference_index):
        return [float(i) for i in range(len(candidates))]


class BigramModel(ScoringModel):
    """Add-one-smoothed bigram language model over whitespace tokens.

    The score of a candidate next token is the observed count of the pair
    (previous token, candidate) plus one. The parameter count reported to
    manifests is the number of distinct observed bigrams.
    """

    name = "bigram"
    token_level = "word"
    task_kinds = frozenset({"next-token"})

    def __init__(self, counts: dict[str, Counter], vocab: tuple[str, ...]):
        self._counts = counts
        self._vocab = vocab
        self.param_count = sum(len(successors) for successors in counts.values())

    @classmethod
    def fit(cls, documents: Iterable[Sequence[str]]) -> "BigramModel":
        counts: dict[str, Counter] = {}
        vocab: set[str] = set()
        for tokens in documents:
            vocab.update(tokens)
            for prev, nxt in zip(tokens, tokens[1:]):
                counts.setdefault(prev, Counter())[nxt] += 1
        if not counts:
            raise ValueError("corpus has no token pairs to fit a bigram model")
        return cls(counts, tuple(sorted(vocab)))

    def vocabulary(self):
        return self._vocab

    def score(self, context, candidates, reference_index):
        if not context:
            raise ValueError("bigram scoring needs at least one context token")
        successors = self._counts.get(context[-1])
        if successors is None:
            return [1.0] * len(candidates)
        return [float(successors.get(c, 0) + 1) for c in candidates]


_BUILTIN = {
    "oracle": OracleModel,
    "reversed": ReversedIndexModel,
}


def resolve_model(
    spec: str | ScoringModel,
    task_kind: str,
    documents: Sequence[Sequence[str]] | None = None,
) -> ScoringModel:
    """Return a ready model for ``spec``, checking task compatibility.

    ``spec`` is a builtin name or an already-constructed :class:`ScoringModel`.
    ``documents`` supplies the fitting corpus for corpus-fitted models such
    as ``bigram``.
    """
    if isinstance(spec, ScoringModel):
        model = spec
    elif spec in _BUILTIN:
        model = _BUILTIN[spec]()
    elif spec == "bigram":
        if documents is None:
            raise UnknownModelError("model 'bigram' needs a token corpus to fit")
        model = BigramModel.fit(documents)
    else:
        names = ", ".join(sorted([*_BUILTIN, "bigram"]))
        raise UnknownModelError(f"unknown model {spec!r}; builtin models: {names}")
    if task_kind not in model.task_kinds:
        raise ValueError(
            f"model {model.name!r} does not support task-kind {task_kind!r}"
        )
    return model
