import json

import pytest

from failrank.datasets import (
    DatasetError,
    load_candidate_rows,
    load_documents,
    resolve_dataset,
)
from failrank.extract import (
    DEFAULT_PREFIX_MIN_LENGTH,
    ExtractionJob,
    JobError,
    extract_run,
    write_result,
)
from failrank.models import (
    BigramModel,
    ScoringModel,
    UnknownModelError,
    resolve_model,
)


def _write_rows(path, rows):
    path.write_text("".join(json.dumps(r) + "\n" for r in rows))
    return path


def _row(instance_id, n_candidates, reference):
    return {
        "instance_id": instance_id,
        "candidates": [f"c{i}" for i in range(n_candidates)],
        "reference_index": reference,
    }


def _write_docs(path, docs):
    path.write_text("\n\n".join(" ".join(tokens) for tokens in docs) + "\n")
    return path


def test_oracle_rows_all_zero(tmp_path):
    dataset = _write_rows(
        tmp_path / "rows.jsonl",
        [_row("a", 5, 3), _row("b", 2, 0), _row("c", 9, 8)],
    )
    result = extract_run(
        ExtractionJob(task_kind="classification", model="oracle", dataset=dataset)
    )
    assert [r.instance_id for r in result.records] == ["a", "b", "c"]
    assert all(r.failure_count == 0 for r in result.records)
    assert result.errors == ()
    assert result.instances_seen == 3


def test_reversed_rows_distance_from_last(tmp_path):
    dataset = _write_rows(
        tmp_path / "rows.jsonl",
        [_row("a", 5, 0), _row("b", 5, 4), _row("c", 7, 3)],
    )
    result = extract_run(
        ExtractionJob(task_kind="retrieval", model="reversed", dataset=dataset)
    )
    assert [r.failure_count for r in result.records] == [4, 0, 3]


def test_oracle_next_token_all_zero(tmp_path):
    docs = [("a", "b", "c", "d"), ("e", "f", "g")]
    dataset = _write_docs(tmp_path / "corpus.txt", docs)
    result = extract_run(
        ExtractionJob(
            task_kind="next-token", model="oracle", dataset=dataset,
            prefix_min_length=1,
        )
    )
    assert len(result.records) == sum(len(d) - 1 for d in docs)
    assert all(r.failure_count == 0 for r in result.records)
    assert result.records[0].instance_id == "doc01:1"


def test_reversed_next_token_closed_form(tmp_path):
    docs = [("the", "cat", "sat"), ("the", "dog", "ran", "off")]
    dataset = _write_docs(tmp_path / "corpus.txt", docs)
    result = extract_run(
        ExtractionJob(
            task_kind="next-token", model="reversed", dataset=dataset,
            prefix_min_length=1,
        )
    )
    vocab = sorted({t for d in docs for t in d})
    index = {t: i for i, t in enumerate(vocab)}
    expected = {}
    for d, tokens in enumerate(docs, start=1):
        for pos in range(1, len(tokens)):
            expected[f"doc{d:02d}:{pos}"] = len(vocab) - 1 - index[tokens[pos]]
    assert {r.instance_id: r.failure_count for r in result.records} == expected


def test_bigram_counts_by_hand(tmp_path):
    dataset = _write_docs(tmp_path / "corpus.txt", [("a", "b", "a", "b", "a", "c")])
    result = extract_run(
        ExtractionJob(
            task_kind="next-token", model="bigram", dataset=dataset,
            prefix_min_length=1,
        )
    )
    # bigrams: a->b twice, b->a twice, a->c once; only the final "c" is
    # out-scored (by "b" with smoothed count 3 vs 2)
    assert [r.failure_count for r in result.records] == [0, 0, 0, 0, 1]
    pessimistic = extract_run(
        ExtractionJob(
            task_kind="next-token", model="bigram", dataset=dataset,
            prefix_min_length=1, pessimistic_ties=True,
        )
    )
    strict = [r.failure_count for r in result.records]
    loose = [r.failure_count for r in pessimistic.records]
    assert all(p >= s for s, p in zip(strict, loose))


def test_bigram_unseen_context_scores_flat():
    model = BigramModel.fit([("a", "b")])
    assert model.score(("z",), ("a", "b"), 0) == [1.0, 1.0]
    assert model.score(("a",), ("a", "b"), 0) == [1.0, 2.0]
    with pytest.raises(ValueError):
        model.score((), ("a",), 0)
    with pytest.raises(ValueError):
        BigramModel.fit([("solo",)])


def test_prefix_minimum_skips_short_positions(tmp_path):
    tokens = tuple(f"t{i}" for i in range(12))
    dataset = _write_docs(tmp_path / "corpus.txt", [tokens])
    result = extract_run(
        ExtractionJob(
            task_kind="next-token", model="oracle", dataset=dataset,
            prefix_min_length=5,
        )
    )
    assert result.instances_seen == 11
    assert result.skipped == 4
    assert [r.instance_id for r in result.records] == [
        f"doc01:{p}" for p in range(5, 12)
    ]


def test_prefix_minimum_defaults_to_1000(tmp_path):
    dataset = _write_docs(tmp_path / "corpus.txt", [("a", "b", "c")])
    job = ExtractionJob(task_kind="next-token", model="oracle", dataset=dataset)
    assert job.min_prefix == DEFAULT_PREFIX_MIN_LENGTH == 1000
    result = extract_run(job)
    assert result.records == ()
    assert result.skipped == result.instances_seen == 2


def test_shots_prepend_context_and_are_not_scored(tmp_path):
    docs = [tuple(f"s{i}" for i in range(6)), tuple(f"e{i}" for i in range(4))]
    dataset = _write_docs(tmp_path / "corpus.txt", docs)
    result = extract_run(
        ExtractionJob(
            task_kind="next-token", model="oracle", dataset=dataset,
            prefix_min_length=7, shots=1,
        )
    )
    # doc02 position p has prefix 6 + p, so p=1 (prefix 7) onward survives
    assert [r.instance_id for r in result.records] == ["doc02:1", "doc02:2", "doc02:3"]
    tighter = extract_run(
        ExtractionJob(
            task_kind="next-token", model="oracle", dataset=dataset,
            prefix_min_length=8, shots=1,
        )
    )
    assert [r.instance_id for r in tighter.records] == ["doc02:2", "doc02:3"]
    with pytest.raises(JobError):
        extract_run(
            ExtractionJob(
                task_kind="next-token", model="oracle", dataset=dataset, shots=2
            )
        )


def test_shots_hold_out_leading_rows(tmp_path):
    dataset = _write_rows(
        tmp_path / "rows.jsonl", [_row("a", 3, 0), _row("b", 3, 1), _row("c", 3, 2)]
    )
    result = extract_run(
        ExtractionJob(
            task_kind="classification", model="oracle", dataset=dataset, shots=1
        )
    )
    assert [r.instance_id for r in result.records] == ["b", "c"]
    assert result.manifest["shots"] == 1
    with pytest.raises(JobError):
        extract_run(
            ExtractionJob(
                task_kind="classification", model="oracle", dataset=dataset, shots=3
            )
        )


class _FlakyModel(ScoringModel):
    name = "flaky"

    def __init__(self):
        self.calls = 0

    def score(self, context, candidates, reference_index):
        self.calls += 1
        if self.calls == 2:
            raise RuntimeError("scoring backend fell over")
        return [1.0 if i == reference_index else 0.0 for i in range(len(candidates))]


def test_per_instance_failures_logged_not_fatal(tmp_path):
    dataset = _write_rows(
        tmp_path / "rows.jsonl",
        [_row("a", 3, 0), _row("b", 3, 1), _row("c", 3, 2)],
    )
    result = extract_run(
        ExtractionJob(task_kind="classification", model=_FlakyModel(), dataset=dataset)
    )
    assert [r.instance_id for r in result.records] == ["a", "c"]
    assert result.errors == (("b", "scoring backend fell over"),)
    assert result.instances_seen == 3


class _NarrowVocabModel(ScoringModel):
    name = "narrow"
    task_kinds = frozenset({"next-token"})

    def vocabulary(self):
        return ("a", "b")

    def score(self, context, candidates, reference_index):
        return [0.0] * len(candidates)


def test_token_missing_from_model_vocabulary_is_logged(tmp_path):
    dataset = _write_docs(tmp_path / "corpus.txt", [("a", "b", "z", "a")])
    result = extract_run(
        ExtractionJob(
            task_kind="next-token", model=_NarrowVocabModel(), dataset=dataset,
            prefix_min_length=1,
        )
    )
    assert [r.instance_id for r in result.records] == ["doc01:1", "doc01:3"]
    ((instance, message),) = result.errors
    assert instance == "doc01:2"
    assert "not in model vocabulary" in message


class _WrongWidthModel(ScoringModel):
    name = "wrong-width"

    def score(self, context, candidates, reference_index):
        return [1.0]


def test_wrong_score_width_is_logged(tmp_path):
    dataset = _write_rows(tmp_path / "rows.jsonl", [_row("a", 3, 0)])
    result = extract_run(
        ExtractionJob(
            task_kind="classification", model=_WrongWidthModel(), dataset=dataset
        )
    )
    assert result.records == ()
    ((instance, message),) = result.errors
    assert instance == "a"
    assert "1 scores for 3 candidates" in message


def test_malformed_rows_are_line_numbered(tmp_path):
    path = tmp_path / "rows.jsonl"
    path.write_text(
        json.dumps(_row("good1", 3, 0)) + "\n"
        + "this is not json\n"
        + json.dumps({"candidates": [], "reference_index": 0}) + "\n"
        + json.dumps(_row("good2", 4, 3)) + "\n"
    )
    result = extract_run(
        ExtractionJob(task_kind="classification", model="oracle", dataset=path)
    )
    assert [r.instance_id for r in result.records] == ["good1", "good2"]
    assert [e[0] for e in result.errors] == ["rows.jsonl:2", "rows.jsonl:3"]


def test_unusable_datasets_fail_the_job(tmp_path):
    all_bad = tmp_path / "bad.jsonl"
    all_bad.write_text("nope\nstill nope\n")
    with pytest.raises(JobError):
        extract_run(
            ExtractionJob(task_kind="classification", model="oracle", dataset=all_bad)
        )
    empty = tmp_path / "empty.jsonl"
    empty.write_text("")
    with pytest.raises(JobError):
        extract_run(
            ExtractionJob(task_kind="classification", model="oracle", dataset=empty)
        )
    with pytest.raises(JobError):
        extract_run(
            ExtractionJob(
                task_kind="classification", model="oracle",
                dataset=tmp_path / "missing.jsonl",
            )
        )


def test_candidate_row_field_validation(tmp_path):
    path = tmp_path / "rows.jsonl"
    path.write_text(
        json.dumps({"candidates": ["x", "y"], "reference_index": 2}) + "\n"
        + json.dumps({"candidates": ["x", "y"], "reference_index": True}) + "\n"
        + json.dumps({"candidates": ["x"], "reference_index": 0, "instance_id": 7}) + "\n"
        + json.dumps({"candidates": ["x"], "reference_index": 0, "query": 3}) + "\n"
        + json.dumps(["not", "an", "object"]) + "\n"
        + json.dumps({"candidates": ["x", "y"], "reference_index": 1}) + "\n"
    )
    rows, rejects = load_candidate_rows(path)
    assert len(rows) == 1 and rows[0].instance_id == "row6"
    assert [r[0] for r in rejects] == [f"rows.jsonl:{n}" for n in (1, 2, 3, 4, 5)]


def test_job_validation():
    with pytest.raises(ValueError, match="task_kind"):
        ExtractionJob(task_kind="tarot", model="oracle", dataset="x")
    with pytest.raises(ValueError, match="shots"):
        ExtractionJob(task_kind="retrieval", model="oracle", dataset="x", shots=-1)
    with pytest.raises(ValueError, match="shots"):
        ExtractionJob(task_kind="retrieval", model="oracle", dataset="x", shots=True)
    with pytest.raises(ValueError, match="next-token"):
        ExtractionJob(
            task_kind="classification", model="oracle", dataset="x",
            prefix_min_length=10,
        )
    with pytest.raises(ValueError, match="prefix_min_length"):
        ExtractionJob(
            task_kind="next-token", model="oracle", dataset="x",
            prefix_min_length=-1,
        )
    with pytest.raises(ValueError, match="run_id"):
        ExtractionJob(
            task_kind="retrieval", model="oracle", dataset="x", run_id="a/b"
        )
    assert ExtractionJob(
        task_kind="classification", model="oracle", dataset="x"
    ).min_prefix is None


def test_model_registry():
    with pytest.raises(UnknownModelError):
        resolve_model("gpt-17", "classification")
    with pytest.raises(UnknownModelError):
        resolve_model("bigram", "next-token", documents=None)
    with pytest.raises(ValueError, match="task-kind"):
        resolve_model("bigram", "retrieval", documents=[("a", "b")])
    assert resolve_model("oracle", "recommendation").name == "oracle"
    model = resolve_model("bigram", "next-token", documents=[("a", "b", "a")])
    assert model.param_count == 2  # a->b and b->a
    assert model.vocabulary() == ("a", "b")


def test_manifest_shape(tmp_path):
    docs = [tuple("abcdfg"), tuple("gfdcba")]
    dataset = _write_docs(tmp_path / "tiny.txt", docs)
    result = extract_run(
        ExtractionJob(
            task_kind="next-token", model="bigram", dataset=dataset,
            prefix_min_length=1, shots=0,
        )
    )
    manifest = result.manifest
    assert sorted(manifest) == [
        "dataset", "param_count", "run_id", "seed", "shots", "subject_name", "task",
    ]
    assert manifest["run_id"] == "bigram-tiny-next-token"
    assert manifest["subject_name"] == "bigram"
    assert manifest["task"] == "next-token (word tokens)"
    assert manifest["dataset"] == str(dataset)
    assert manifest["shots"] == 0
    assert manifest["seed"] is None
    assert isinstance(manifest["param_count"], int) and manifest["param_count"] > 0


def test_manifest_for_parameterless_stub(tmp_path):
    dataset = _write_rows(tmp_path / "rows.jsonl", [_row("a", 2, 0)])
    result = extract_run(
        ExtractionJob(
            task_kind="classification", model="oracle", dataset=dataset,
            run_id="named-run",
        )
    )
    assert result.manifest["param_count"] is None
    assert result.manifest["task"] == "classification"
    assert result.manifest["run_id"] == "named-run"


def test_write_result_is_deterministic(tmp_path):
    dataset = _write_docs(
        tmp_path / "corpus.txt", [("a", "b", "a", "c", "a", "b")]
    )
    job = ExtractionJob(
        task_kind="next-token", model="bigram", dataset=dataset,
        prefix_min_length=1,
    )
    first = write_result(extract_run(job), tmp_path / "one")
    second = write_result(extract_run(job), tmp_path / "two")
    for role in ("records", "manifest", "log"):
        assert first[role].read_bytes() == second[role].read_bytes()
    log = json.loads(first["log"].read_text())
    assert log["records"] == 5
    assert log["errors"] == []
    lines = first["records"].read_text().splitlines()
    assert json.loads(lines[0]) == {"failure_count": 0, "instance_id": "doc01:1"}


def test_write_result_with_no_records(tmp_path):
    dataset = _write_docs(tmp_path / "corpus.txt", [("a", "b", "c")])
    result = extract_run(
        ExtractionJob(task_kind="next-token", model="oracle", dataset=dataset)
    )
    paths = write_result(result, tmp_path / "out")
    assert paths["records"].read_bytes() == b""
    log = json.loads(paths["log"].read_text())
    assert log["records"] == 0 and log["skipped"] == 2


def test_bundled_corpus_loads():
    path = resolve_dataset("tiny-corpus")
    documents = load_documents(path)
    assert len(documents) == 10
    assert sum(len(d.tokens) for d in documents) > 3000
    assert documents[0].doc_id == "doc01"
    with pytest.raises(DatasetError):
        resolve_dataset("no-such-dataset")


def test_empty_document_file_rejected(tmp_path):
    blank = tmp_path / "blank.txt"
    blank.write_text("\n\n   \n")
    with pytest.raises(DatasetError):
        load_documents(blank)
