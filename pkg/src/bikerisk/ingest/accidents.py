"""Accident record parsing, validation, and batch extraction.

Accident datasets arrive as CSV or JSON with the column map
``id, lat, lon, severity, cause, year, month, weekday, hour, street_type``.
Timestamps are anonymized to (year, month, weekday, hour), so no calendar day
is stored. Severity labels map onto the three classes via a configurable
schema; records sharing an id are collapsed to the first occurrence, which
also absorbs the duplicates produced by overlapping extraction windows.
"""

from __future__ import annotations

import csv
import io
import json
import logging
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import IO, Callable, Iterable, Union

from ..errors import DataError
from ..geo import BoundingBox, GeoPoint
from .subdivide import subdivide_region

log = logging.getLogger(__name__)


class Severity(Enum):
    LIGHT = "light"
    SEVERE = "severe"
    DEATH = "death"


class Cause(Enum):
    SELF_CAUSED = "self-caused"
    HEAD_ON = "head-on"
    CROSSING_LANES = "crossing-lanes"
    OVERTAKING = "overtaking"
    REAR_END = "rear-end"
    TURNING = "turning"
    OTHER = "other"


DEFAULT_SEVERITY_MAP = {
    "light": Severity.LIGHT,
    "severe": Severity.SEVERE,
    "death": Severity.DEATH,
}

_CAUSE_MAP = {c.value: c for c in Cause}

COLUMNS = ("id", "lat", "lon", "severity", "cause", "year", "month", "weekday", "hour", "street_type")


@dataclass(frozen=True)
class AccidentRecord:
    id: str
    location: GeoPoint
    severity: Severity
    cause: Cause
    year: int
    month: int
    weekday: int  # 0 = Monday .. 6 = Sunday
    hour: int
    street_type: str


@dataclass
class AccidentSchema:
    """Declares how raw rows map onto records and which rows are admissible."""

    severity_map: dict[str, Severity] = field(default_factory=lambda: dict(DEFAULT_SEVERITY_MAP))
    year_range: tuple[int, int] = (1900, 2100)
    bbox: BoundingBox | None = None


@dataclass
class AccidentLoadResult:
    records: list[AccidentRecord]
    row_errors: list[tuple[int, str]]
    dropped_outside: int
    duplicate_ids: int

    def count_by_severity(self) -> dict[Severity, int]:
        counts = {s: 0 for s in Severity}
        for r in self.records:
            counts[r.severity] += 1
        return counts


Source = Union[str, Path, IO[str], IO[bytes]]


def _read_text(source: Source) -> str:
    if isinstance(source, (str, Path)):
        return Path(source).read_text(encoding="utf-8")
    data = source.read()
    if isinstance(data, bytes):
        return data.decode("utf-8")
    return data


def _iter_rows(text: str) -> Iterable[dict]:
    stripped = text.lstrip()
    if stripped.startswith("[") or stripped.startswith("{"):
        doc = json.loads(text)
        rows = doc if isinstance(doc, list) else doc.get("records", [])
        yield from rows
    else:
        yield from csv.DictReader(io.StringIO(text))


def _parse_row(row: dict, schema: AccidentSchema) -> AccidentRecord:
    missing = [c for c in COLUMNS if c not in row or row[c] in (None, "")]
    if missing and missing != ["street_type"]:
        raise ValueError(f"missing fields: {', '.join(missing)}")
    sev_label = str(row["severity"]).strip().lower()
    if sev_label not in schema.severity_map:
        raise ValueError(f"unknown severity label: {row['severity']!r}")
    year = int(row["year"])
    lo, hi = schema.year_range
    if not lo <= year <= hi:
        raise ValueError(f"year {year} outside configured range [{lo}, {hi}]")
    month = int(row["month"])
    weekday = int(row["weekday"])
    hour = int(row["hour"])
    if not 1 <= month <= 12:
        raise ValueError(f"month out of range: {month}")
    if not 0 <= weekday <= 6:
        raise ValueError(f"weekday out of range: {weekday}")
    if not 0 <= hour <= 23:
        raise ValueError(f"hour out of range: {hour}")
    cause = _CAUSE_MAP.get(str(row["cause"]).strip().lower(), Cause.OTHER)
    return AccidentRecord(
        id=str(row["id"]),
        location=GeoPoint(float(row["lat"]), float(row["lon"])),
        severity=schema.severity_map[sev_label],
        cause=cause,
        year=year,
        month=month,
        weekday=weekday,
        hour=hour,
        street_type=str(row.get("street_type") or ""),
    )


def load_accidents(source: Source, schema: AccidentSchema | None = None) -> AccidentLoadResult:
    """Parse, validate, and deduplicate accident records from CSV or JSON."""
    schema = schema or AccidentSchema()
    records: list[AccidentRecord] = []
    row_errors: list[tuple[int, str]] = []
    seen_ids: set[str] = set()
    dropped_outside = 0
    duplicates = 0
    try:
        rows = list(_iter_rows(_read_text(source)))
    except (json.JSONDecodeError, csv.Error, UnicodeDecodeError) as exc:
        raise DataError(f"accident source unreadable: {exc}") from exc
    for i, row in enumerate(rows):
        try:
            rec = _parse_row(row, schema)
        except (ValueError, TypeError) as exc:
            row_errors.append((i, str(exc)))
            continue
        if rec.id in seen_ids:
            duplicates += 1
            continue
        seen_ids.add(rec.id)
        if schema.bbox is not None and not schema.bbox.contains(rec.location.lat, rec.location.lon):
            dropped_outside += 1
            continue
        records.append(rec)
    if dropped_outside:
        log.info("dropped %d accident records outside the configured bounding box", dropped_outside)
    if row_errors:
        log.warning("rejected %d malformed accident rows", len(row_errors))
    return AccidentLoadResult(records, row_errors, dropped_outside, duplicates)


def batch_extract(
    fetch: Callable[[BoundingBox], list[dict]],
    box: BoundingBox,
    locations: Iterable[GeoPoint],
    schema: AccidentSchema | None = None,
    batch_limit: int = 200,
    overlap_deg: float = 1e-5,
) -> AccidentLoadResult:
    """Window-by-window extraction through a paged fetcher.

    Mirrors how a rate-limited map API is drained: the region is quartered
    until every cell holds at most ``batch_limit`` points, each cell is
    fetched with a slight overlap so boundary points are never missed, and
    the resulting duplicates are collapsed by record id.
    """
    schema = schema or AccidentSchema()
    cells = subdivide_region(box, locations, batch_limit)
    rows: list[dict] = []
    for cell in cells:
        window = BoundingBox(
            GeoPoint(max(-90.0, cell.min.lat - overlap_deg), max(-180.0, cell.min.lon - overlap_deg)),
            GeoPoint(min(90.0, cell.max.lat + overlap_deg), min(180.0, cell.max.lon + overlap_deg)),
        )
        rows.extend(fetch(window))
    text = json.dumps(rows)
    return load_accidents(io.StringIO(text), schema)


def make_file_fetcher(rows: list[dict]) -> Callable[[BoundingBox], list[dict]]:
    """Fetcher over an in-memory row set, standing in for a live extraction API."""

    def fetch(window: BoundingBox) -> list[dict]:
        out = []
        for row in rows:
            try:
                lat, lon = float(row["lat"]), float(row["lon"])
            except (KeyError, TypeError, ValueError):
                continue
            if window.contains(lat, lon):
                out.append(row)
        return out

    return fetch
