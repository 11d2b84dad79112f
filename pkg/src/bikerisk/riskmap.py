"""Projection of the risk surface onto the street graph, and contour export.

An edge's risk weight is its length times the mean of the interpolated risk
along the edge, so exposure scales with how long a cyclist stays on the
street. Short edges use the two endpoints; edges longer than the sampling
threshold are sampled at evenly spaced points and combined by the trapezoid
rule, which agrees exactly with the endpoint mean on fields linear in lat/lon.
"""

from __future__ import annotations

import logging
import math

import numpy as np
from skimage import measure

from .density import RiskGrid
from .errors import DataError
from .geo import GeoPoint
from .graph import StreetGraph, WeightedStreetGraph

log = logging.getLogger(__name__)

LONG_EDGE_SAMPLE_M = 200.0


def _fractional_index(values: np.ndarray, lo: float, step: float, x: float, n: int) -> tuple[int, float]:
    f = (x - lo) / step
    i = int(math.floor(f))
    i = min(max(i, 0), n - 2)
    return i, f - i


def interpolate_risk(grid: RiskGrid, node: GeoPoint) -> float:
    """Bilinear interpolation of the four grid vertices around ``node``."""
    g = grid.grid
    if not g.bbox.contains(node.lat, node.lon):
        raise DataError(f"point ({node.lat}, {node.lon}) outside the risk grid")
    iy, ty = _fractional_index(grid.values, g.bbox.min.lat, g.dy, node.lat, g.ny)
    ix, tx = _fractional_index(grid.values, g.bbox.min.lon, g.dx, node.lon, g.nx)
    v = grid.values
    return float(
        v[iy, ix] * (1 - ty) * (1 - tx)
        + v[iy, ix + 1] * (1 - ty) * tx
        + v[iy + 1, ix] * ty * (1 - tx)
        + v[iy + 1, ix + 1] * ty * tx
    )


def interpolate_many(grid: RiskGrid, lats: np.ndarray, lons: np.ndarray) -> np.ndarray:
    """Vectorized bilinear interpolation; all points must be inside the bbox."""
    g = grid.grid
    box = g.bbox
    if np.any((lats < box.min.lat) | (lats > box.max.lat) | (lons < box.min.lon) | (lons > box.max.lon)):
        raise DataError("interpolation points outside the risk grid")
    fy = (lats - box.min.lat) / g.dy
    fx = (lons - box.min.lon) / g.dx
    iy = np.clip(np.floor(fy).astype(int), 0, g.ny - 2)
    ix = np.clip(np.floor(fx).astype(int), 0, g.nx - 2)
    ty = fy - iy
    tx = fx - ix
    v = grid.values
    return (
        v[iy, ix] * (1 - ty) * (1 - tx)
        + v[iy, ix + 1] * (1 - ty) * tx
        + v[iy + 1, ix] * ty * (1 - tx)
        + v[iy + 1, ix + 1] * ty * tx
    )


def assign_edge_risk(
    grid: RiskGrid,
    graph: StreetGraph | WeightedStreetGraph,
    long_edge_sample_m: float = LONG_EDGE_SAMPLE_M,
) -> WeightedStreetGraph:
    """Populate the risk side of the weighted graph.

    Edges with an endpoint outside the grid are flagged with an infinite
    weight so routing skips them; a warning reports how many.
    """
    wsg = graph if isinstance(graph, WeightedStreetGraph) else WeightedStreetGraph(graph)
    g = wsg.graph
    box = grid.grid.bbox
    inside = np.array([box.contains(nd.lat, nd.lon) for nd in g.nodes])
    node_risk = np.zeros(len(g.nodes))
    if inside.any():
        node_risk[inside] = interpolate_many(grid, g.node_lats[inside], g.node_lons[inside])

    risk = np.empty(len(g.edges))
    excluded = 0
    for e in g.edges:
        if not (inside[e.u] and inside[e.v]):
            risk[e.id] = math.inf
            excluded += 1
            continue
        if e.length_m > long_edge_sample_m:
            k = math.ceil(e.length_m / long_edge_sample_m)
            t = np.linspace(0.0, 1.0, k + 1)
            a, b = g.nodes[e.u], g.nodes[e.v]
            samples = interpolate_many(grid, a.lat + (b.lat - a.lat) * t, a.lon + (b.lon - a.lon) * t)
            mean = float(np.trapezoid(samples, t))
        else:
            mean = 0.5 * (node_risk[e.u] + node_risk[e.v])
        risk[e.id] = e.length_m * mean
    if excluded:
        log.warning("%d edges have endpoints outside the risk grid and are excluded from routing", excluded)
    wsg.risk = risk
    return wsg


def extract_contours(grid: RiskGrid, levels: list[float]) -> dict:
    """Marching-squares iso-lines per level as a GeoJSON FeatureCollection.

    Levels outside the value range simply contribute no features. Coordinates
    follow GeoJSON order, [lon, lat].
    """
    if any(b <= a for a, b in zip(levels, levels[1:])):
        raise DataError("contour levels must be strictly increasing")
    g = grid.grid
    lat0, lon0 = g.bbox.min.lat, g.bbox.min.lon
    features = []
    for level in levels:
        for line in measure.find_contours(grid.values, level):
            coords = [[lon0 + c * g.dx, lat0 + r * g.dy] for r, c in line]
            features.append(
                {
                    "type": "Feature",
                    "geometry": {"type": "LineString", "coordinates": coords},
                    "properties": {"level": level},
                }
            )
    return {
        "type": "FeatureCollection",
        "features": features,
        "metadata": {"high_color": "orange", "low_color": "purple"},
    }
