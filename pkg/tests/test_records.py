"""Record model, ingestion, and persistence."""

import io
import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from failtail.records import (
    DuplicateRunError,
    FailureRecord,
    IngestError,
    RunManifest,
    RunStore,
    ingest_records,
    load_manifest,
    register_run,
    save_manifest,
    serialize_records,
)


def test_identity_parse():
    result = ingest_records(b'{"instance_id":"a","failure_count":0}\n')
    assert list(result) == [FailureRecord("a", 0, 1.0)]
    assert result.rejects == ()


def test_negative_count_rejected_with_line_number():
    data = b'{"instance_id":"a","failure_count":2}\n{"instance_id":"b","failure_count":-1}\n'
    result = ingest_records(data)
    assert len(result) == 1
    assert len(result.rejects) == 1
    line, reason = result.rejects[0]
    assert line == 2
    assert "failure_count" in reason


def test_order_preserved():
    data = b"\n".join(
        json.dumps({"instance_id": f"i{n}", "failure_count": c}).encode() for n, c in enumerate([0, 7, 7])
    )
    result = ingest_records(data)
    assert [r.failure_count for r in result] == [0, 7, 7]


def test_malformed_line_raises_with_line_number():
    data = b'{"instance_id":"a","failure_count":1}\nnot json\n'
    with pytest.raises(IngestError) as exc_info:
        ingest_records(data)
    assert exc_info.value.line_number == 2


def test_missing_field_is_malformed():
    with pytest.raises(IngestError, match="line 1"):
        ingest_records(b'{"instance_id":"a"}\n')


def test_accepted_plus_rejected_equals_total():
    rows = [
        {"instance_id": "a", "failure_count": 1},
        {"instance_id": "b", "failure_count": -3},
        {"instance_id": "c", "failure_count": 0, "weight": 0.0},
        {"instance_id": "d", "failure_count": 9, "weight": 2.5},
    ]
    data = ("\n".join(json.dumps(r) for r in rows) + "\n").encode()
    result = ingest_records(data)
    assert len(result) + len(result.rejects) == result.total_rows == 4
    assert len(result) == 2


def test_weight_defaults_to_one():
    (rec,) = ingest_records(b'{"instance_id":"x","failure_count":3}\n')
    assert rec.weight == 1.0


def test_unknown_jsonl_fields_survive_round_trip():
    line = {"instance_id": "q", "failure_count": 4, "token_index": 17, "note": "tail"}
    result = ingest_records((json.dumps(line) + "\n").encode())
    assert result[0].extra == {"token_index": 17, "note": "tail"}
    reparsed = ingest_records(serialize_records(list(result)))
    assert list(reparsed) == list(result)


def test_csv_round_trip_with_weights():
    data = b"instance_id,failure_count,weight\na,3,1.5\nb,0,2.0\n"
    result = ingest_records(data, "csv")
    assert [r.weight for r in result] == [1.5, 2.0]
    again = ingest_records(serialize_records(list(result), "csv"), "csv")
    assert list(again) == list(result)


def test_csv_without_weight_column():
    result = ingest_records(b"instance_id,failure_count\na,3\n", "csv")
    assert list(result) == [FailureRecord("a", 3)]


def test_csv_bad_header():
    with pytest.raises(IngestError, match="header"):
        ingest_records(b"id,count\na,3\n", "csv")


def test_csv_non_integer_count_is_malformed():
    with pytest.raises(IngestError, match="line 2"):
        ingest_records(b"instance_id,failure_count\na,x\n", "csv")


def test_ingest_from_stream_and_path(tmp_path):
    payload = b'{"instance_id":"s","failure_count":5}\n'
    from_stream = ingest_records(io.BytesIO(payload))
    path = tmp_path / "records.jsonl"
    path.write_bytes(payload)
    from_path = ingest_records(path)
    assert list(from_stream) == list(from_path)


def test_record_invariants():
    with pytest.raises(ValueError):
        FailureRecord("a", -1)
    with pytest.raises(ValueError):
        FailureRecord("a", 0, weight=0.0)
    with pytest.raises(TypeError):
        FailureRecord("a", 1.5)  # type: ignore[arg-type]


_json_scalars = st.one_of(
    st.text(max_size=8),
    st.integers(-1000, 1000),
    st.floats(allow_nan=False, allow_infinity=False, width=32),
    st.booleans(),
    st.none(),
)


@settings(max_examples=60, deadline=None)
@given(
    st.lists(
        st.builds(
            FailureRecord,
            instance_id=st.text(max_size=12),
            failure_count=st.integers(0, 10**9),
            weight=st.floats(min_value=1e-6, max_value=1e6, allow_nan=False),
            extra=st.dictionaries(
                st.text(min_size=1, max_size=8).filter(lambda k: k not in ("instance_id", "failure_count", "weight")),
                _json_scalars,
                max_size=3,
            ),
        ),
        max_size=20,
    )
)
def test_jsonl_round_trip_property(records):
    assert list(ingest_records(serialize_records(records))) == records


@settings(max_examples=40, deadline=None)
@given(
    st.lists(
        st.builds(
            FailureRecord,
            instance_id=st.text(alphabet=st.characters(blacklist_characters="\r\n\x00"), max_size=12),
            failure_count=st.integers(0, 10**9),
            weight=st.floats(min_value=1e-6, max_value=1e6, allow_nan=False),
        ),
        max_size=20,
    )
)
def test_csv_round_trip_property(records):
    assert list(ingest_records(serialize_records(records, "csv"), "csv")) == records


def test_csv_rejects_unrepresentable_instance_ids():
    for bad in ("a\x00b", "a\nb", "a\rb"):
        with pytest.raises(ValueError, match="CSV"):
            serialize_records([FailureRecord(bad, 1)], "csv")
        # the same records are fine as JSONL
        (rec,) = ingest_records(serialize_records([FailureRecord(bad, 1)], "jsonl"))
        assert rec.instance_id == bad


def test_store_register_and_retrieve():
    store = RunStore()
    records = [FailureRecord(f"i{n}", n) for n in range(10)]
    register_run(store, RunManifest("r1"), records)
    assert len(store) == 1
    assert store.records("r1") == tuple(records)

    register_run(store, RunManifest("r2"), [FailureRecord("j", 1)])
    assert store.records("r1")[0].instance_id == "i0"
    assert store.records("r2")[0].instance_id == "j"


def test_store_duplicate_run_id():
    store = RunStore()
    register_run(store, RunManifest("r1"), [FailureRecord("a", 1)])
    with pytest.raises(DuplicateRunError):
        register_run(store, RunManifest("r1"), [FailureRecord("b", 2)])


def test_store_rejects_empty_run():
    with pytest.raises(ValueError, match="no records"):
        register_run(RunStore(), RunManifest("r1"), [])


def test_manifest_validation():
    with pytest.raises(ValueError):
        RunManifest("")
    with pytest.raises(ValueError):
        RunManifest("r", param_count=0)
    assert RunManifest("r", param_count=7).param_count == 7


def test_manifest_file_round_trip(tmp_path):
    manifest = RunManifest("run-a", subject_name="m", param_count=10**12, task="writing", dataset="d", shots=2, seed=5)
    path = tmp_path / "manifest.json"
    save_manifest(manifest, path)
    assert load_manifest(path) == manifest


def test_manifest_param_count_must_be_json_integer(tmp_path):
    path = tmp_path / "m.json"
    path.write_text('{"run_id": "r", "param_count": 1e12}')
    with pytest.raises(TypeError):
        load_manifest(path)
    path.write_text('{"run_id": "r", "param_count": "1e12"}')
    with pytest.raises(TypeError):
        load_manifest(path)


def test_manifest_unknown_field_rejected(tmp_path):
    path = tmp_path / "m.json"
    path.write_text('{"run_id": "r", "extra_field": 1}')
    with pytest.raises(ValueError, match="unknown"):
        load_manifest(path)
