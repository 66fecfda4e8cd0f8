import csv
import json

import pytest

from experiments.coupon import run_coupon
from experiments.records import (
    ExperimentRecord,
    IncompatibleVersionError,
    RecordParseError,
    load,
    persist,
    record_json_schema,
    sidecar_path,
    write_csv,
    write_outputs,
)


def small_record(seed: int = 1) -> ExperimentRecord:
    return run_coupon(4, trials=25, seed=seed, threads=1)


def test_persist_and_load(tmp_path):
    record = small_record()
    path = persist(record, tmp_path / "coupon.json")
    loaded = load(path)
    assert loaded.rows == record.rows
    assert loaded.summary == record.summary
    assert loaded.run_info == record.run_info


def test_primary_file_excludes_timing(tmp_path):
    path = persist(small_record(), tmp_path / "coupon.json")
    data = json.loads(path.read_text(encoding="utf-8"))
    assert "run_info" not in data
    assert data["format_version"] == 1
    side = json.loads(sidecar_path(path).read_text(encoding="utf-8"))
    assert "wall_seconds" in side
    assert sidecar_path(path).name == "coupon.run.json"


def test_same_seed_gives_identical_primary_files(tmp_path):
    a = persist(small_record(7), tmp_path / "a.json")
    b = persist(small_record(7), tmp_path / "b.json")
    assert a.read_bytes() == b.read_bytes()


def test_corrupted_file_reports_byte_offset(tmp_path):
    path = tmp_path / "bad.json"
    text = '{"kind": "coupon", "note": "é", oops}'
    path.write_text(text, encoding="utf-8")
    with pytest.raises(RecordParseError) as info:
        load(path)
    assert info.value.offset == len(text[: text.index("oops")].encode("utf-8"))


def test_version_mismatch(tmp_path):
    path = persist(small_record(), tmp_path / "r.json")
    data = json.loads(path.read_text(encoding="utf-8"))
    data["format_version"] = 99
    path.write_text(json.dumps(data), encoding="utf-8")
    with pytest.raises(IncompatibleVersionError):
        load(path)


def test_schema_violation(tmp_path):
    path = tmp_path / "r.json"
    path.write_text(json.dumps({"format_version": 1, "kind": "unknown", "params": {}}), encoding="utf-8")
    with pytest.raises(RecordParseError):
        load(path)


def test_json_schema_lists_record_fields():
    schema = record_json_schema()
    assert {"kind", "params", "rows", "cells", "summary"} <= set(schema["properties"])


def test_csv_has_one_row_per_trial(tmp_path):
    path = write_csv(small_record(), tmp_path / "c.csv")
    with path.open(newline="", encoding="utf-8") as f:
        rows = list(csv.DictReader(f))
    assert len(rows) == 25
    assert rows[0]["kind"] == "coupon"
    assert rows[0]["param_d"] == "4"
    assert int(rows[0]["draws"]) >= 4


def test_write_outputs_with_plot(tmp_path):
    write_outputs(small_record(), tmp_path / "c.json", "json", tmp_path / "c.svg")
    assert (tmp_path / "c.json").exists()
    svg = (tmp_path / "c.svg").read_text(encoding="utf-8")
    assert svg.lstrip().startswith("<?xml") and "<svg" in svg


def test_corrupted_sidecar_reports_byte_offset(tmp_path):
    path = persist(small_record(), tmp_path / "coupon.json")
    sidecar_path(path).write_text('{"wall_seconds": 1.0,', encoding="utf-8")
    with pytest.raises(RecordParseError) as info:
        load(path)
    assert "coupon.run.json" in str(info.value)
    assert info.value.offset == len('{"wall_seconds": 1.0,')
