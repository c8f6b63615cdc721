from __future__ import annotations

import csv
import io
import json
import os
import uuid
from dataclasses import asdict, dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Any, Optional, TextIO

from filelock import FileLock

from .experiments import ConvergenceRecord

CSV_COLUMNS = ["method", "problem", "dim", "tau", "gamma", "q", "n", "error"]
FLOAT_COLUMNS = {"tau", "gamma", "error"}


@dataclass
class RunManifest:
    subcommand: str
    parameters: dict[str, Any]
    tool_version: str
    timestamp: str = field(default_factory=lambda: datetime.now().isoformat())
    id: str = field(default_factory=lambda: f"run-{uuid.uuid4().hex[:8]}")
    output: Optional[str] = None

    def to_dict(self) -> dict:
        data = asdict(self)
        # Don't persist missing output (stdout runs)
        if data.get("output") is None:
            data.pop("output", None)
        return data

    @classmethod
    def from_dict(cls, data: dict) -> RunManifest:
        data = data.copy()
        if "output" not in data:
            data["output"] = None
        return cls(**data)


@dataclass
class RunLedger:
    runs: dict[str, RunManifest] = field(default_factory=dict)

    @classmethod
    def path(cls) -> Path:
        return (
            Path(
                os.environ.get(
                    "RKRYLOV_DATA_DIR",
                    Path.home() / ".local" / "share" / "resolvent-krylov",
                )
            )
            / "runs.json"
        )

    @classmethod
    def lock_path(cls) -> Path:
        return cls.path().with_suffix(".lock")

    @classmethod
    def load(cls) -> RunLedger:
        path = cls.path()
        if not path.exists():
            return cls()

        with open(path) as f:
            data = json.load(f)

        runs = {k: RunManifest.from_dict(v) for k, v in data.get("runs", {}).items()}
        return cls(runs=runs)

    def save(self) -> None:
        path = self.path()
        path.parent.mkdir(parents=True, exist_ok=True)

        data = {"runs": {k: v.to_dict() for k, v in self.runs.items()}}

        with open(path, "w") as f:
            json.dump(data, f, indent=2)

    def add_run(self, manifest: RunManifest) -> None:
        self.runs[manifest.id] = manifest

    def get_run(self, run_id: str) -> Optional[RunManifest]:
        return self.runs.get(run_id)

    def remove_run(self, run_id: str) -> bool:
        return self.runs.pop(run_id, None) is not None


class TransactionalLedger:
    def __init__(self):
        self._lock = FileLock(RunLedger.lock_path(), timeout=10)
        self._ledger: Optional[RunLedger] = None

    def __enter__(self) -> RunLedger:
        self._lock.acquire()
        self._ledger = RunLedger.load()
        return self._ledger

    def __exit__(self, exc_type, exc_val, exc_tb) -> None:
        if exc_type is None and self._ledger:
            self._ledger.save()
        self._lock.release()
        self._ledger = None


def _format_cell(column: str, value: Any) -> str:
    if column in FLOAT_COLUMNS:
        return f"{float(value):.17e}"
    return str(value)


def write_csv(stream: TextIO, records: list[ConvergenceRecord]) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for record in records:
        row = record.to_row()
        writer.writerow([_format_cell(c, row[c]) for c in CSV_COLUMNS])


def records_to_csv(records: list[ConvergenceRecord]) -> str:
    buffer = io.StringIO()
    write_csv(buffer, records)
    return buffer.getvalue()


def read_csv(path: Path) -> list[ConvergenceRecord]:
    with open(path, newline="") as f:
        return [ConvergenceRecord.from_row(row) for row in csv.DictReader(f)]


def manifest_sidecar(path: Path) -> Path:
    return path.with_name(path.name + ".manifest.json")


def write_results(
    path: Path,
    records: list[ConvergenceRecord],
    manifest: RunManifest,
    fmt: str = "csv",
    extras: Optional[dict[str, Any]] = None,
) -> None:
    """Write records once; CSV gets a manifest sidecar, JSON embeds it."""
    path.parent.mkdir(parents=True, exist_ok=True)
    payload_manifest = manifest.to_dict()
    if fmt == "json":
        data = {
            "manifest": payload_manifest,
            "records": [r.to_row() for r in records],
            "extras": extras or {},
        }
        with open(path, "w") as f:
            json.dump(data, f, indent=2)
        return

    with open(path, "w", newline="") as f:
        write_csv(f, records)
    with open(manifest_sidecar(path), "w") as f:
        json.dump({"manifest": payload_manifest, "extras": extras or {}}, f, indent=2)


def read_json(path: Path) -> tuple[RunManifest, list[ConvergenceRecord]]:
    with open(path) as f:
        data = json.load(f)
    records = [ConvergenceRecord.from_row(row) for row in data.get("records", [])]
    return RunManifest.from_dict(data["manifest"]), records


def write_table(path: Path, header: list[str], rows: list[list[Any]]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([f"{v:.17e}" if isinstance(v, float) else v for v in row])
