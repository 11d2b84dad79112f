"""GPS trace loading and transport-mode filtering.

Traces arrive as GPX files. Each ``<trk>`` may carry a ``<type>`` element
labeling the means of transport; tracks labeled with a non-bike mode are
dropped entirely, while unlabeled tracks are kept under the assumption that
overall traffic volume is a usable proxy for bike traffic on multi-use
streets.
"""

from __future__ import annotations

import logging
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import IO, Iterable, Union

from ..errors import DataError
from ..geo import BoundingBox, GeoPoint

log = logging.getLogger(__name__)


class Mode(Enum):
    BIKE = "bike"
    OTHER = "other"
    UNLABELED = "unlabeled"


_BIKE_LABELS = {"bike", "bicycle", "cycling", "cycle", "mtb"}


@dataclass(frozen=True)
class TraceSample:
    location: GeoPoint
    trace_id: str
    mode: Mode


@dataclass
class TraceLoadResult:
    samples: list[TraceSample]
    removed_non_bike: int
    dropped_outside: int
    skipped_files: list[str]


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _classify(label: str | None) -> Mode:
    if label is None or not label.strip():
        return Mode.UNLABELED
    return Mode.BIKE if label.strip().lower() in _BIKE_LABELS else Mode.OTHER


def _parse_gpx(data: bytes, origin: str) -> list[tuple[str, Mode, list[GeoPoint]]]:
    root = ET.fromstring(data)
    tracks = []
    for ti, trk in enumerate(e for e in root.iter() if _local(e.tag) == "trk"):
        name = None
        mode_label = None
        points: list[GeoPoint] = []
        for child in trk.iter():
            tag = _local(child.tag)
            if tag == "name" and name is None:
                name = (child.text or "").strip() or None
            elif tag == "type" and mode_label is None:
                mode_label = child.text
            elif tag == "trkpt":
                points.append(GeoPoint(float(child.attrib["lat"]), float(child.attrib["lon"])))
        trace_id = f"{origin}#{name or ti}"
        tracks.append((trace_id, _classify(mode_label), points))
    return tracks


Source = Union[str, Path, IO[bytes], Iterable[Union[str, Path]]]


def _expand_sources(source: Source) -> list[tuple[str, bytes]]:
    if hasattr(source, "read"):
        data = source.read()
        if isinstance(data, str):
            data = data.encode("utf-8")
        return [(getattr(source, "name", "<stream>"), data)]
    if isinstance(source, (str, Path)):
        path = Path(source)
        if path.is_dir():
            paths = sorted(p for p in path.iterdir() if p.suffix.lower() in (".gpx", ".xml"))
        else:
            paths = [path]
    else:
        paths = [Path(p) for p in source]
    return [(str(p), p.read_bytes()) for p in paths]


def load_traces(source: Source, bbox: BoundingBox | None = None) -> TraceLoadResult:
    """Load GPX traces, drop non-bike tracks, and clip to ``bbox`` when given.

    Unparseable files are skipped with a warning; an entirely empty result is
    an error because density estimation cannot proceed without traffic samples.
    """
    samples: list[TraceSample] = []
    removed = 0
    dropped_outside = 0
    skipped: list[str] = []
    for origin, data in _expand_sources(source):
        try:
            tracks = _parse_gpx(data, Path(origin).stem)
        except (ET.ParseError, ValueError, KeyError) as exc:
            log.warning("skipping unparseable trace file %s: %s", origin, exc)
            skipped.append(origin)
            continue
        for trace_id, mode, points in tracks:
            if mode is Mode.OTHER:
                removed += len(points)
                continue
            for p in points:
                if bbox is not None and not bbox.contains(p.lat, p.lon):
                    dropped_outside += 1
                    continue
                samples.append(TraceSample(p, trace_id, mode))
    if not samples:
        raise DataError("no usable trace samples after filtering; estimation cannot proceed")
    return TraceLoadResult(samples, removed, dropped_outside, skipped)
