"""Street graph construction from 3D coordinate polylines.

The source format is newline-delimited JSON: each line is one street segment
given as an array of ``[lat, lon, alt]`` points (altitude may be null). Points
are matched across segments within a coordinate tolerance, interior points
with exactly two neighbors are contracted away so only intersections and dead
ends remain, and each surviving edge keeps the full geodesic length of the
polyline chain it replaces. The grade of an edge is the altitude difference
between its endpoints divided by its length, clamped to [-1, 1].
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Union

from ..errors import DataError
from ..geo import haversine_m
from ..graph import StreetEdge, StreetGraph, StreetNode

log = logging.getLogger(__name__)

DEFAULT_TOLERANCE_DEG = 1e-6


@dataclass
class NetworkBuildResult:
    graph: StreetGraph
    raw_point_count: int
    raw_segment_count: int
    raw_total_length_m: float
    dropped_zero_length: int
    dropped_self_loops: int
    dropped_ring_edges: int
    dropped_length_m: float  # length removed with self-loops and rings
    missing_altitude_edges: int
    near_miss_endpoint_pairs: int
    component_sizes: list[int]


Source = Union[str, Path, IO[str], IO[bytes]]


def _read_lines(source: Source) -> list[str]:
    if isinstance(source, (str, Path)):
        text = Path(source).read_text(encoding="utf-8")
    else:
        raw = source.read()
        text = raw.decode("utf-8") if isinstance(raw, bytes) else raw
    return [ln for ln in text.splitlines() if ln.strip()]


def _parse_polylines(source: Source) -> list[list[tuple[float, float, float]]]:
    polylines = []
    for lineno, line in enumerate(_read_lines(source), start=1):
        try:
            arr = json.loads(line)
            pts = []
            for p in arr:
                lat, lon = float(p[0]), float(p[1])
                alt = float(p[2]) if len(p) > 2 and p[2] is not None else math.nan
                pts.append((lat, lon, alt))
        except (ValueError, TypeError, IndexError) as exc:
            raise DataError(f"malformed street segment on line {lineno}: {exc}") from exc
        if len(pts) >= 2:
            polylines.append(pts)
    return polylines


def build_street_graph(source: Source, tolerance_deg: float = DEFAULT_TOLERANCE_DEG) -> NetworkBuildResult:
    """Build the simplified intersection graph from raw street polylines."""
    polylines = _parse_polylines(source)
    if not polylines:
        raise DataError("street network source contains no segments")

    # Node identity: quantize coordinates so points within the tolerance of one
    # another collapse onto the same key.
    def key_of(lat: float, lon: float) -> tuple[int, int]:
        return (round(lat / tolerance_deg), round(lon / tolerance_deg))

    coords: dict[tuple[int, int], tuple[float, float, float]] = {}
    endpoint_keys: set[tuple[int, int]] = set()

    def register(lat: float, lon: float, alt: float) -> tuple[int, int]:
        k = key_of(lat, lon)
        if k not in coords:
            coords[k] = (lat, lon, alt)
        elif math.isnan(coords[k][2]) and not math.isnan(alt):
            lat0, lon0, _ = coords[k]
            coords[k] = (lat0, lon0, alt)
        return k

    raw_edges: list[tuple[tuple[int, int], tuple[int, int], float]] = []
    raw_point_count = 0
    dropped_zero_length = 0
    raw_total_length = 0.0
    for pts in polylines:
        raw_point_count += len(pts)
        keys = [register(lat, lon, alt) for lat, lon, alt in pts]
        endpoint_keys.add(keys[0])
        endpoint_keys.add(keys[-1])
        for (a, (lat1, lon1, _)), (b, (lat2, lon2, _)) in zip(
            zip(keys, pts), zip(keys[1:], pts[1:])
        ):
            if a == b:
                dropped_zero_length += 1
                continue
            length = haversine_m(lat1, lon1, lat2, lon2)
            if length <= 0.0:
                dropped_zero_length += 1
                continue
            raw_total_length += length
            raw_edges.append((a, b, length))
    if not raw_edges:
        raise DataError("street network reduced to zero usable segments")

    adj: dict[tuple[int, int], list[tuple[int, tuple[int, int]]]] = {}
    for eid, (a, b, _) in enumerate(raw_edges):
        adj.setdefault(a, []).append((eid, b))
        adj.setdefault(b, []).append((eid, a))

    near_miss = _count_near_miss_endpoints(endpoint_keys, coords, tolerance_deg)

    kept = [k for k in coords if len(adj.get(k, ())) != 2 and adj.get(k)]
    kept_set = set(kept)

    node_ids: dict[tuple[int, int], int] = {}
    nodes: list[StreetNode] = []

    def node_id(k: tuple[int, int]) -> int:
        if k not in node_ids:
            lat, lon, alt = coords[k]
            node_ids[k] = len(nodes)
            nodes.append(StreetNode(len(nodes), lat, lon, alt))
        return node_ids[k]

    edges: list[StreetEdge] = []
    visited = [False] * len(raw_edges)
    dropped_self_loops = 0
    dropped_length = 0.0
    missing_altitude = 0

    def clamp_grade(alt_u: float, alt_v: float, length: float) -> tuple[float, bool]:
        if math.isnan(alt_u) or math.isnan(alt_v):
            return 0.0, True
        return max(-1.0, min(1.0, (alt_v - alt_u) / length)), False

    for start in kept:
        for eid0, nxt0 in adj[start]:
            if visited[eid0]:
                continue
            # Walk through degree-2 points until the next kept node.
            visited[eid0] = True
            length = raw_edges[eid0][2]
            prev, cur = start, nxt0
            while cur not in kept_set:
                (ea, na), (eb, nb) = adj[cur]
                eid, nxt = (eb, nb) if visited[ea] else (ea, na)
                if visited[eid]:
                    break
                visited[eid] = True
                length += raw_edges[eid][2]
                prev, cur = cur, nxt
            if cur == start:
                dropped_self_loops += 1
                dropped_length += length
                continue
            u, v = node_id(start), node_id(cur)
            grade, missing = clamp_grade(coords[start][2], coords[cur][2], length)
            if missing:
                missing_altitude += 1
            edges.append(StreetEdge(len(edges), u, v, length, grade))

    dropped_ring_edges = sum(1 for flag in visited if not flag)
    dropped_length += sum(raw_edges[i][2] for i, flag in enumerate(visited) if not flag)

    if dropped_self_loops:
        log.warning("dropped %d self-loop streets produced by simplification", dropped_self_loops)
    if dropped_ring_edges:
        log.warning("dropped %d raw segments forming isolated rings with no intersection", dropped_ring_edges)
    if missing_altitude:
        log.warning("grade set to 0 on %d edges with missing altitude", missing_altitude)

    graph = StreetGraph(nodes, edges)
    comp_sizes = [len(c) for c in graph.connected_components()]
    if len(comp_sizes) > 1:
        log.info(
            "street graph has %d components; largest holds %d of %d nodes",
            len(comp_sizes), comp_sizes[0], len(nodes),
        )
    return NetworkBuildResult(
        graph=graph,
        raw_point_count=raw_point_count,
        raw_segment_count=len(polylines),
        raw_total_length_m=raw_total_length,
        dropped_zero_length=dropped_zero_length,
        dropped_self_loops=dropped_self_loops,
        dropped_ring_edges=dropped_ring_edges,
        dropped_length_m=dropped_length,
        missing_altitude_edges=missing_altitude,
        near_miss_endpoint_pairs=near_miss,
        component_sizes=comp_sizes,
    )


def _count_near_miss_endpoints(
    endpoint_keys: set[tuple[int, int]],
    coords: dict[tuple[int, int], tuple[float, float, float]],
    tolerance_deg: float,
) -> int:
    """Endpoint pairs that almost meet (within 5x tolerance) but stayed distinct.

    These are reported rather than snapped; snapping unquantified near-misses
    would silently rewire the network.
    """
    count = 0
    seen: set[tuple[tuple[int, int], tuple[int, int]]] = set()
    for k in endpoint_keys:
        klat, klon = k
        for dlat in range(-5, 6):
            for dlon in range(-5, 6):
                if dlat == 0 and dlon == 0:
                    continue
                other = (klat + dlat, klon + dlon)
                if other not in endpoint_keys:
                    continue
                pair = (min(k, other), max(k, other))
                if pair in seen:
                    continue
                lat1, lon1, _ = coords[k]
                lat2, lon2, _ = coords[other]
                if abs(lat1 - lat2) <= 5 * tolerance_deg and abs(lon1 - lon2) <= 5 * tolerance_deg:
                    seen.add(pair)
                    count += 1
    if count:
        log.warning("%d endpoint pairs almost meet (within 5x tolerance) but were kept distinct", count)
    return count
