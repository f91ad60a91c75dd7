"""Line-delimited JSON persistence for datasets, annotations and reports.

Every record type is one JSON object per line; appends are line-atomic so
files stay valid under concurrent writers and process kills.
"""

from __future__ import annotations

import fcntl
import json
import os
from dataclasses import dataclass, asdict, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Optional

from .tables import Table, parse_linearized, serialize


class DatastoreError(Exception):
    pass


class AllLinesMalformed(DatastoreError):
    pass


class DuplicateRating(DatastoreError):
    pass


class ExampleSource(str, Enum):
    STATISTA = "statista"
    PEW = "pew"
    SCICAP = "scicap"
    SYNTHETIC = "synthetic"
    OTHER = "other"


@dataclass(frozen=True)
class ExampleRecord:
    id: str
    title: str
    table: str  # linearized form; parses via tables.parse_linearized
    reference_summary: Optional[str] = None
    candidate_summaries: tuple[str, ...] = ()
    source: ExampleSource = ExampleSource.OTHER
    image_url: Optional[str] = None

    def parsed_table(self) -> Table:
        return parse_linearized(self.table)

    def to_json(self) -> str:
        data = asdict(self)
        data["candidate_summaries"] = list(self.candidate_summaries)
        data["source"] = self.source.value
        return json.dumps(data, ensure_ascii=False, sort_keys=True)

    @staticmethod
    def from_json(line: str) -> "ExampleRecord":
        data = json.loads(line)
        return ExampleRecord(
            id=data["id"],
            title=data.get("title", ""),
            table=data["table"],
            reference_summary=data.get("reference_summary"),
            candidate_summaries=tuple(data.get("candidate_summaries", ())),
            source=ExampleSource(data.get("source", "other")),
            image_url=data.get("image_url"),
        )


@dataclass(frozen=True)
class AnnotationRecord:
    example_id: str
    sentence_index: int
    rater_id: str
    entailed: bool
    relevant: bool
    grammatical: bool
    timestamp: float = 0.0

    @property
    def key(self) -> tuple[str, int, str]:
        return (self.example_id, self.sentence_index, self.rater_id)

    def to_json(self) -> str:
        return json.dumps(asdict(self), ensure_ascii=False, sort_keys=True)

    @staticmethod
    def from_json(line: str) -> "AnnotationRecord":
        data = json.loads(line)
        return AnnotationRecord(
            example_id=data["example_id"],
            sentence_index=int(data["sentence_index"]),
            rater_id=data["rater_id"],
            entailed=bool(data["entailed"]),
            relevant=bool(data["relevant"]),
            grammatical=bool(data["grammatical"]),
            timestamp=float(data.get("timestamp", 0.0)),
        )


@dataclass
class LoadReport:
    records: list
    errors: list[tuple[int, str]] = field(default_factory=list)


def load_dataset(path: str | Path) -> LoadReport:
    """Streaming JSONL load; malformed lines go to the error report."""
    records: list[ExampleRecord] = []
    errors: list[tuple[int, str]] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                records.append(ExampleRecord.from_json(line))
            except (json.JSONDecodeError, KeyError, ValueError) as exc:
                errors.append((lineno, str(exc)))
    if errors and not records:
        raise AllLinesMalformed(f"{len(errors)} malformed lines, 0 valid")
    return LoadReport(records=records, errors=errors)


def save_dataset(records: Iterable[ExampleRecord], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(record.to_json() + "\n")


def load_annotations(path: str | Path) -> list[AnnotationRecord]:
    if not Path(path).exists():
        return []
    out = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                out.append(AnnotationRecord.from_json(line))
    return out


def append_annotation(record: AnnotationRecord, path: str | Path) -> None:
    """Atomic line append; rejects duplicate (example, sentence, rater) keys.

    An advisory file lock serializes the check-then-append across
    processes and threads.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "a+", encoding="utf-8") as fh:
        fcntl.flock(fh.fileno(), fcntl.LOCK_EX)
        try:
            fh.seek(0)
            for line in fh:
                if not line.strip():
                    continue
                existing = AnnotationRecord.from_json(line)
                if existing.key == record.key:
                    raise DuplicateRating(f"already rated: {record.key}")
            fh.seek(0, os.SEEK_END)
            fh.write(record.to_json() + "\n")
            fh.flush()
        finally:
            fcntl.flock(fh.fileno(), fcntl.LOCK_UN)
