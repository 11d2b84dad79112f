import io
import json

import pytest

from bikerisk.errors import DataError
from bikerisk.geo import BoundingBox, GeoPoint
from bikerisk.ingest.accidents import (
    AccidentSchema,
    Cause,
    Severity,
    batch_extract,
    load_accidents,
    make_file_fetcher,
)

HEADER = "id,lat,lon,severity,cause,year,month,weekday,hour,street_type"


def row(id_="A1", lat=47.37, lon=8.53, severity="light", cause="self-caused",
        year=2015, month=6, weekday=2, hour=17, street="principal"):
    return f"{id_},{lat},{lon},{severity},{cause},{year},{month},{weekday},{hour},{street}"


def load(rows, schema=None):
    return load_accidents(io.StringIO("\n".join([HEADER] + rows)), schema)


def test_duplicate_ids_collapse_to_one():
    result = load([row("X"), row("X", severity="severe")])
    assert len(result.records) == 1
    assert result.duplicate_ids == 1
    assert result.records[0].severity is Severity.LIGHT  # first occurrence wins


def test_idempotent_under_concatenation():
    rows = [row(f"A{i}") for i in range(10)]
    once = load(rows)
    twice = load(rows + rows)
    assert [r.id for r in once.records] == [r.id for r in twice.records]
    assert twice.duplicate_ids == 10


def test_custom_severity_mapping():
    schema = AccidentSchema(severity_map={"fatal": Severity.DEATH, "light": Severity.LIGHT})
    result = load([row(severity="fatal")], schema)
    assert result.records[0].severity is Severity.DEATH


def test_unknown_severity_rejected_and_reported():
    result = load([row("A1"), row("A2", severity="catastrophic")])
    assert len(result.records) == 1
    assert len(result.row_errors) == 1
    idx, msg = result.row_errors[0]
    assert idx == 1 and "severity" in msg


def test_malformed_rows_collected_with_index():
    result = load([row("A1"), row("A2", lat="not-a-number"), row("A3", month=13)])
    assert len(result.records) == 1
    assert [i for i, _ in result.row_errors] == [1, 2]


def test_year_range_enforced():
    schema = AccidentSchema(year_range=(2011, 2017))
    result = load([row("A1", year=2015), row("A2", year=2019)], schema)
    assert len(result.records) == 1
    assert "year" in result.row_errors[0][1]


def test_bbox_filter_reports_dropped():
    schema = AccidentSchema(bbox=BoundingBox.from_extents(47.0, 8.0, 48.0, 9.0))
    result = load([row("A1"), row("A2", lat=50.0)], schema)
    assert len(result.records) == 1
    assert result.dropped_outside == 1


def test_json_source_and_cause_mapping():
    doc = [
        {"id": "J1", "lat": 47.37, "lon": 8.53, "severity": "severe", "cause": "head-on",
         "year": 2014, "month": 2, "weekday": 5, "hour": 3, "street_type": "minor"},
        {"id": "J2", "lat": 47.37, "lon": 8.53, "severity": "light", "cause": "unknown-cause",
         "year": 2014, "month": 2, "weekday": 5, "hour": 3, "street_type": ""},
    ]
    result = load_accidents(io.StringIO(json.dumps(doc)))
    assert result.records[0].cause is Cause.HEAD_ON
    assert result.records[1].cause is Cause.OTHER


def test_unreadable_source_raises():
    with pytest.raises(DataError):
        load_accidents(io.StringIO('{"records": not json'))


def test_fixture_totals(fixture_dir):
    schema = AccidentSchema(year_range=(2011, 2017))
    result = load_accidents(fixture_dir / "accidents.csv", schema)
    counts = result.count_by_severity()
    assert len(result.records) == 1305
    assert counts[Severity.LIGHT] == 1023
    assert counts[Severity.SEVERE] == 277
    assert counts[Severity.DEATH] == 5


def test_batch_extract_dedups_window_overlap():
    rows = []
    for i in range(40):
        lat = 0.1 + 0.8 * (i % 8) / 7
        lon = 0.1 + 0.8 * (i // 8) / 4
        rows.append({"id": f"B{i}", "lat": lat, "lon": lon, "severity": "light",
                     "cause": "turning", "year": 2015, "month": 5, "weekday": 1,
                     "hour": 8, "street_type": "minor"})
    box = BoundingBox.from_extents(0.0, 0.0, 1.0, 1.0)
    locations = [GeoPoint(r["lat"], r["lon"]) for r in rows]
    result = batch_extract(make_file_fetcher(rows), box, locations, batch_limit=6)
    assert sorted(r.id for r in result.records) == sorted(r["id"] for r in rows)
