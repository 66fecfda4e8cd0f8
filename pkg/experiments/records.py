"""Experiment records: JSON persistence with a timing sidecar, CSV export.

The primary JSON file holds everything that is a function of (seed,
parameters); wall-clock data goes to ``<stem>.run.json`` next to it so two
runs with the same seed produce byte-identical primary files.
"""
from __future__ import annotations

import csv
import json
import os
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, Field, ValidationError

from linalg.errors import RandomizingError
from runtime.settings import RECORD_FORMAT_VERSION, TOOL_VERSION

PathLike = Union[str, Path]


class IncompatibleVersionError(RandomizingError):
    pass


class RecordParseError(RandomizingError):
    def __init__(self, message: str, offset: Optional[int] = None):
        self.offset = offset
        where = f" at byte {offset}" if offset is not None else ""
        super().__init__(f"{message}{where}")


class ExperimentRecord(BaseModel):
    format_version: int = RECORD_FORMAT_VERSION
    tool_version: str = TOOL_VERSION
    kind: Literal["scaling", "coupon", "concentration"]
    params: Dict[str, Any]
    rows: List[Dict[str, Any]] = Field(default_factory=list)
    cells: List[Dict[str, Any]] = Field(default_factory=list)
    summary: Dict[str, Any] = Field(default_factory=dict)
    settings: Dict[str, Any] = Field(default_factory=dict)
    run_info: Dict[str, Any] = Field(default_factory=dict)


def sidecar_path(path: PathLike) -> Path:
    p = Path(path)
    return p.with_name(f"{p.stem}.run.json")


def _write_atomic(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def write_model(model: BaseModel, path: PathLike) -> Path:
    """Write ``model`` without its ``run_info``; the latter goes to the sidecar."""
    p = Path(path)
    _write_atomic(p, model.model_dump_json(indent=2, exclude={"run_info"}) + "\n")
    run_info = getattr(model, "run_info", None)
    if run_info:
        _write_atomic(sidecar_path(p), json.dumps(run_info, indent=2) + "\n")
    print(f"[records] wrote {p}")
    return p


def persist(record: ExperimentRecord, path: PathLike) -> Path:
    return write_model(record, path)


def _read_object(p: Path) -> Dict[str, Any]:
    text = p.read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise RecordParseError(f"{p}: {e.msg}", offset=len(text[: e.pos].encode("utf-8")))
    if not isinstance(data, dict):
        raise RecordParseError(f"{p}: top level must be an object", offset=0)
    return data


def load(path: PathLike) -> ExperimentRecord:
    p = Path(path)
    data = _read_object(p)
    version = data.get("format_version")
    if version != RECORD_FORMAT_VERSION:
        raise IncompatibleVersionError(
            f"{p} has format_version={version!r}; this tool reads version {RECORD_FORMAT_VERSION}"
        )
    side = sidecar_path(p)
    if side.exists():
        data["run_info"] = _read_object(side)
    try:
        return ExperimentRecord.model_validate(data)
    except ValidationError as e:
        raise RecordParseError(f"{p}: {e.error_count()} schema violation(s): {e.errors()[0]['msg']}")


def record_json_schema() -> Dict[str, Any]:
    return ExperimentRecord.model_json_schema()


def _csv_cell(value: Any) -> Any:
    if isinstance(value, (list, dict)):
        return json.dumps(value)
    return value


def write_csv(record: ExperimentRecord, path: PathLike) -> Path:
    """One row per trial; scalar parameters are repeated on every row."""
    p = Path(path)
    params = {f"param_{k}": _csv_cell(v) for k, v in record.params.items()}
    keys: List[str] = []
    for row in record.rows:
        keys += [k for k in row if k not in keys]
    header = ["kind", *params, *keys]
    p.parent.mkdir(parents=True, exist_ok=True)
    tmp = p.with_suffix(p.suffix + ".tmp")
    with tmp.open("w", newline="", encoding="utf-8") as f:
        writer = csv.DictWriter(f, fieldnames=header)
        writer.writeheader()
        for row in record.rows:
            writer.writerow({"kind": record.kind, **params, **{k: _csv_cell(v) for k, v in row.items()}})
    os.replace(tmp, p)
    print(f"[records] wrote {p} ({len(record.rows)} rows)")
    return p


def write_outputs(
    record: ExperimentRecord,
    out: Optional[PathLike] = None,
    fmt: str = "json",
    plot: Optional[PathLike] = None,
) -> None:
    if out:
        if fmt == "csv":
            write_csv(record, out)
        else:
            persist(record, out)
    if plot:
        from experiments.plots import plot_record

        plot_record(record, plot)
