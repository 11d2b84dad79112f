"""Deterministic synthetic city fixtures.

The bundled demo dataset is a lattice city laid out inside the default study
box: a block grid with a few removed segments and diagonal avenues, a hill in
the northeast, accident clusters around two hotspot corridors, and GPS traces
generated as random street walks. Everything derives from a single seed so
the fixture files are reproducible byte for byte.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import PipelineConfig
from .geo import BoundingBox, GeoPoint
from .graph import StreetGraph
from .router import RouteQuery, export_route_txt, find_route

DEFAULT_SEED = 20190501

GRID_COLS = 22
GRID_ROWS = 16
INNER_MARGIN = 0.07  # fraction of the box kept clear around the lattice


@dataclass
class CityPlan:
    bbox: BoundingBox
    lats: np.ndarray  # lattice row latitudes
    lons: np.ndarray  # lattice column longitudes
    segments: list[tuple[tuple[int, int], tuple[int, int]]]  # (col,row) index pairs
    hotspots: list[tuple[float, float]]  # (lat, lon) accident cluster centers

    def node_lat(self, r: int) -> float:
        return float(self.lats[r])

    def node_lon(self, c: int) -> float:
        return float(self.lons[c])

    def altitude(self, lat: float, lon: float) -> float:
        south = self.bbox.min.lat
        hill_lat, hill_lon = 47.3830, 8.5440
        dlat = lat - hill_lat
        dlon = (lon - hill_lon) * 0.676
        hill = 60.0 * math.exp(-(dlat * dlat + dlon * dlon) / (2.0 * 0.006**2))
        return 408.0 + 3500.0 * (lat - south) + hill


def plan_city(bbox: BoundingBox, seed: int = DEFAULT_SEED) -> CityPlan:
    rng = np.random.default_rng(seed)
    lat_pad = bbox.height * INNER_MARGIN
    lon_pad = bbox.width * INNER_MARGIN
    lats = np.linspace(bbox.min.lat + lat_pad, bbox.max.lat - lat_pad, GRID_ROWS)
    lons = np.linspace(bbox.min.lon + lon_pad, bbox.max.lon - lon_pad, GRID_COLS)

    segments = []
    for r in range(GRID_ROWS):
        for c in range(GRID_COLS - 1):
            segments.append(((c, r), (c + 1, r)))
    for c in range(GRID_COLS):
        for r in range(GRID_ROWS - 1):
            segments.append(((c, r), (c, r + 1)))
    keep = rng.random(len(segments)) > 0.03
    segments = [s for s, k in zip(segments, keep) if k]
    # Two diagonal avenues cutting across the blocks.
    for c0, r0, steps in ((2, 2, 10), (9, 12, 9)):
        for i in range(steps):
            segments.append(((c0 + i, r0 + i % 2), (c0 + i + 1, r0 + (i + 1) % 2)))
    hotspots = [
        (float(lats[10]), float(lons[6])),
        (float(lats[4]), float(lons[15])),
    ]
    return CityPlan(bbox, lats, lons, segments, hotspots)


def write_network(plan: CityPlan, path: Path, seed: int = DEFAULT_SEED) -> int:
    """Write the street network as newline-delimited polyline records."""
    rng = np.random.default_rng(seed + 1)
    lines = []
    for (c1, r1), (c2, r2) in plan.segments:
        a = (plan.node_lat(r1), plan.node_lon(c1))
        b = (plan.node_lat(r2), plan.node_lon(c2))
        n_interior = int(rng.integers(3, 6))
        ts = np.linspace(0.0, 1.0, n_interior + 2)
        pts = []
        for i, t in enumerate(ts):
            lat = a[0] + (b[0] - a[0]) * t
            lon = a[1] + (b[1] - a[1]) * t
            if 0 < i < len(ts) - 1:
                # Slight curvature so interior points are not collinear.
                lat += float(rng.normal(0, 2e-6))
                lon += float(rng.normal(0, 2e-6))
            pts.append([round(lat, 7), round(lon, 7), round(plan.altitude(lat, lon), 2)])
        lines.append(json.dumps(pts))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return len(lines)


def _sample_on_streets(plan: CityPlan, rng: np.random.Generator, n: int, cluster_frac: float = 0.55) -> np.ndarray:
    """Points along street segments; a fraction concentrates near the hotspots."""
    seg_idx = rng.integers(0, len(plan.segments), size=n)
    t = rng.random(n)
    pts = np.empty((n, 2))
    for i, (si, ti) in enumerate(zip(seg_idx, t)):
        (c1, r1), (c2, r2) = plan.segments[si]
        pts[i, 0] = plan.node_lat(r1) + (plan.node_lat(r2) - plan.node_lat(r1)) * ti
        pts[i, 1] = plan.node_lon(c1) + (plan.node_lon(c2) - plan.node_lon(c1)) * ti
    clustered = rng.random(n) < cluster_frac
    for i in np.nonzero(clustered)[0]:
        lat, lon = plan.hotspots[int(rng.integers(0, len(plan.hotspots)))]
        pts[i, 0] = lat + rng.normal(0, 0.0016)
        pts[i, 1] = lon + rng.normal(0, 0.0022)
    pts[:, 0] += rng.normal(0, 5e-5, size=n)
    pts[:, 1] += rng.normal(0, 5e-5, size=n)
    box = plan.bbox
    pad_lat = box.height * 0.01
    pad_lon = box.width * 0.01
    pts[:, 0] = np.clip(pts[:, 0], box.min.lat + pad_lat, box.max.lat - pad_lat)
    pts[:, 1] = np.clip(pts[:, 1], box.min.lon + pad_lon, box.max.lon - pad_lon)
    return pts


_CAUSES = ["self-caused", "head-on", "crossing-lanes", "overtaking", "rear-end", "turning", "other"]
_CAUSE_P = [0.40, 0.09, 0.17, 0.06, 0.10, 0.13, 0.05]
_STREET_TYPES = ["principal", "minor", "path", "square"]
_MONTH_P = np.array([4, 4, 6, 8, 10, 12, 13, 12, 10, 9, 7, 5], dtype=float) / 100.0


def write_accidents(
    plan: CityPlan,
    path: Path,
    seed: int = DEFAULT_SEED,
    counts: tuple[int, int, int] = (1023, 277, 5),
) -> int:
    """Accident CSV with the given light/severe/death counts."""
    rng = np.random.default_rng(seed + 2)
    n = sum(counts)
    severities = ["light"] * counts[0] + ["severe"] * counts[1] + ["death"] * counts[2]
    order = rng.permutation(n)
    pts = _sample_on_streets(plan, rng, n)

    years = rng.choice(np.arange(2011, 2018), size=n, p=np.array([10, 11, 12, 14, 16, 18, 19]) / 100.0)
    months = rng.choice(np.arange(1, 13), size=n, p=_MONTH_P)
    weekdays = rng.choice(np.arange(0, 7), size=n, p=np.array([16, 16, 16, 16, 16, 11, 9]) / 100.0)
    hour_p = np.ones(24)
    hour_p[[7, 8, 9, 16, 17, 18]] = 4.0
    hour_p /= hour_p.sum()
    hours = rng.choice(np.arange(24), size=n, p=hour_p)
    causes = rng.choice(_CAUSES, size=n, p=_CAUSE_P)
    streets = rng.choice(_STREET_TYPES, size=n)

    rows = ["id,lat,lon,severity,cause,year,month,weekday,hour,street_type"]
    for i in range(n):
        rows.append(
            "ACC%05d,%.7f,%.7f,%s,%s,%d,%d,%d,%d,%s"
            % (
                i + 1,
                pts[i, 0],
                pts[i, 1],
                severities[order[i]],
                causes[i],
                years[i],
                months[i],
                weekdays[i],
                hours[i],
                streets[i],
            )
        )
    path.write_text("\n".join(rows) + "\n", encoding="utf-8")
    return n


def _lattice_walk(plan: CityPlan, rng: np.random.Generator, adjacency: dict, steps: int) -> list[tuple[int, int]]:
    nodes = list(adjacency)
    cur = nodes[int(rng.integers(0, len(nodes)))]
    path = [cur]
    prev = None
    for _ in range(steps):
        options = [n for n in adjacency[cur] if n != prev]
        if not options:
            options = list(adjacency[cur])
        if not options:
            break
        prev, cur = cur, options[int(rng.integers(0, len(options)))]
        path.append(cur)
    return path


def write_traces(
    plan: CityPlan,
    out_dir: Path,
    seed: int = DEFAULT_SEED,
    n_trips: int = 240,
    files: int = 12,
) -> int:
    """GPX trace files from random street walks; ~5% of tracks carry a mode label."""
    rng = np.random.default_rng(seed + 3)
    adjacency: dict[tuple[int, int], list[tuple[int, int]]] = {}
    for a, b in plan.segments:
        adjacency.setdefault(a, []).append(b)
        adjacency.setdefault(b, []).append(a)

    out_dir.mkdir(parents=True, exist_ok=True)
    point_total = 0
    trips_per_file = max(1, n_trips // files)
    trip = 0
    for fi in range(files):
        tracks = []
        for _ in range(trips_per_file):
            walk = _lattice_walk(plan, rng, adjacency, steps=int(rng.integers(14, 42)))
            pts = []
            for (c1, r1), (c2, r2) in zip(walk, walk[1:]):
                a_lat, a_lon = plan.node_lat(r1), plan.node_lon(c1)
                b_lat, b_lon = plan.node_lat(r2), plan.node_lon(c2)
                n_pts = 8
                for t in np.linspace(0.0, 1.0, n_pts, endpoint=False):
                    lat = a_lat + (b_lat - a_lat) * t + rng.normal(0, 2.5e-5)
                    lon = a_lon + (b_lon - a_lon) * t + rng.normal(0, 2.5e-5)
                    pts.append((lat, lon))
            label = None
            mod = trip % 100
            if mod in (0, 1, 2):
                label = "bike"
            elif mod in (3, 4):
                label = "car"
            tracks.append((f"trip{trip:04d}", label, pts))
            if label != "car":
                point_total += len(pts)
            trip += 1
        _write_gpx(out_dir / f"traces_{fi:02d}.gpx", tracks)
    return point_total


def _write_gpx(path: Path, tracks: list[tuple[str, str | None, list[tuple[float, float]]]]) -> None:
    parts = ['<?xml version="1.0" encoding="UTF-8"?>', '<gpx version="1.1" creator="bikerisk-synth">']
    for name, label, pts in tracks:
        parts.append("  <trk>")
        parts.append(f"    <name>{name}</name>")
        if label is not None:
            parts.append(f"    <type>{label}</type>")
        parts.append("    <trkseg>")
        for lat, lon in pts:
            parts.append(f'      <trkpt lat="{lat:.7f}" lon="{lon:.7f}"></trkpt>')
        parts.append("    </trkseg>")
        parts.append("  </trk>")
    parts.append("</gpx>")
    path.write_text("\n".join(parts) + "\n", encoding="utf-8")


_CLIMATE = [
    (1, 0.3, 63), (2, 1.3, 60), (3, 5.3, 66), (4, 8.8, 76), (5, 13.3, 101),
    (6, 16.4, 117), (7, 18.6, 106), (8, 17.9, 121), (9, 14.1, 88), (10, 9.9, 78),
    (11, 4.4, 71), (12, 1.4, 70),
]


def write_climate(path: Path) -> None:
    rows = ["month,temperature_c,precipitation_mm"]
    rows += [f"{m},{t},{p}" for m, t, p in _CLIMATE]
    path.write_text("\n".join(rows) + "\n", encoding="utf-8")


def write_config(path: Path) -> None:
    # The demo keeps a much smaller bandwidth than the production default:
    # at city scale the default smooths the surface nearly flat, which makes
    # for a dull map and alpha-insensitive routes.
    doc = {
        "accidents": "accidents.csv",
        "traces": "traces",
        "network": "network.ndjson",
        "climate": "climate.csv",
        "baselines_dir": "baselines",
        "bandwidth": 2e-5,
        "static_dir": "../../frontend",
    }
    path.write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


def write_baselines(wsg, out_dir: Path, n: int = 20, seed: int = DEFAULT_SEED) -> int:
    """Plausibly suboptimal rider routes: waypointed recommendations at alpha 0.3.

    The waypoint detour stands in for the shortcuts and habits of a real
    cyclist clicking a route together on the map.
    """
    rng = np.random.default_rng(seed + 4)
    graph: StreetGraph = wsg.graph
    component = wsg.graph.largest_component()
    out_dir.mkdir(parents=True, exist_ok=True)
    written = 0
    attempts = 0
    while written < n and attempts < n * 20:
        attempts += 1
        dep_id, dst_id = (component[int(i)] for i in rng.integers(0, len(component), size=2))
        dep = GeoPoint(graph.nodes[dep_id].lat, graph.nodes[dep_id].lon)
        dst = GeoPoint(graph.nodes[dst_id].lat, graph.nodes[dst_id].lon)
        span = math.hypot(dep.lat - dst.lat, dep.lon - dst.lon)
        if span < 0.008:
            continue
        mid_lat = (dep.lat + dst.lat) / 2 + float(rng.normal(0, span * 0.18))
        mid_lon = (dep.lon + dst.lon) / 2 + float(rng.normal(0, span * 0.18))
        waypoint = GeoPoint(
            min(max(mid_lat, float(graph.node_lats.min())), float(graph.node_lats.max())),
            min(max(mid_lon, float(graph.node_lons.min())), float(graph.node_lons.max())),
        )
        route = find_route(wsg, RouteQuery(dep, dst, waypoints=(waypoint,), alpha=0.3))
        if len(route.nodes) < 4:
            continue
        (out_dir / f"baseline_{written:02d}.txt").write_text(
            export_route_txt(route, graph), encoding="utf-8"
        )
        written += 1
    return written


def generate_fixtures(root: Path, seed: int = DEFAULT_SEED) -> dict:
    """Write the full fixture set under ``root`` and return a small manifest."""
    from .config import load_config
    from .pipeline import run_pipeline

    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    cfg_defaults = PipelineConfig()
    plan = plan_city(cfg_defaults.study_bbox(), seed)
    n_segments = write_network(plan, root / "network.ndjson", seed)
    n_accidents = write_accidents(plan, root / "accidents.csv", seed)
    n_trace_points = write_traces(plan, root / "traces", seed)
    write_climate(root / "climate.csv")
    write_config(root / "config.json")

    cfg = load_config(root / "config.json")
    artifacts = run_pipeline(cfg)
    n_baselines = write_baselines(artifacts.weighted, root / "baselines", seed=seed)
    return {
        "segments": n_segments,
        "accidents": n_accidents,
        "trace_points": n_trace_points,
        "baselines": n_baselines,
        "nodes": len(artifacts.weighted.graph.nodes),
        "edges": len(artifacts.weighted.graph.edges),
    }
