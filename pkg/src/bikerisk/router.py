"""Point-to-point route queries blending risk and discomfort weights.

The per-edge cost is ``alpha * w_r + (1 - alpha) * w_d`` after each weight
family is divided by its network-wide mean; risk and discomfort live on
incommensurate scales, and without that rescaling the preference parameter
would not sweep a meaningful trade-off. Raw-weight blending stays available
for fidelity experiments.

The search is a deterministic least-cost best-first expansion: paths carry
their accumulated cost, a path dies as soon as some other path has reached
the same node at lower cost, and expansion stops once the destination's best
cost can no longer be beaten. Cost ties resolve to the lexicographically
smallest node sequence, so identical queries return identical routes on any
machine and thread count.
"""

from __future__ import annotations

import heapq
import json
import logging
import math
from dataclasses import dataclass
from typing import IO

import numpy as np

from .errors import DataError, NoRouteError, RoutingError
from .geo import EARTH_RADIUS_M, GeoPoint
from .graph import StreetGraph, WeightedStreetGraph

log = logging.getLogger(__name__)

NEAREST_NODE_WARN_M = 500.0


@dataclass(frozen=True)
class RouteQuery:
    departure: GeoPoint
    destination: GeoPoint
    waypoints: tuple[GeoPoint, ...] = ()
    alpha: float = 0.5

    def __post_init__(self) -> None:
        if not 0.0 <= self.alpha <= 1.0:
            raise RoutingError(f"alpha must lie in [0, 1], got {self.alpha}")


@dataclass(frozen=True)
class Route:
    """Ordered node ids plus the raw weight totals accumulated along them."""

    nodes: tuple[int, ...]
    edges: tuple[int, ...]
    total_risk: float
    total_discomfort: float
    total_length_m: float
    total_cost: float | None = None  # blended cost under the normalized weights used for search
    alpha: float | None = None


@dataclass(frozen=True)
class EdgeCosts:
    """Directed per-edge search costs for one alpha."""

    alpha: float
    fwd: np.ndarray
    bwd: np.ndarray
    risk_norm: float
    discomfort_norm: float

    def from_node(self, edge_u: int, node: int, edge_id: int) -> float:
        arr = self.fwd if node == edge_u else self.bwd
        return float(arr[edge_id])


def blend_weights(wsg: WeightedStreetGraph, alpha: float, normalize: bool = True) -> EdgeCosts:
    """Per-edge blended cost arrays for both traversal directions."""
    if not 0.0 <= alpha <= 1.0:
        raise RoutingError(f"alpha must lie in [0, 1], got {alpha}")
    wsg.require_ready()
    finite = np.isfinite(wsg.risk)
    risk_norm = discomfort_norm = 1.0
    if normalize:
        rmean = float(wsg.risk[finite].mean()) if finite.any() else 0.0
        dmean = float(np.concatenate([wsg.discomfort_fwd, wsg.discomfort_bwd]).mean())
        if rmean > 0:
            risk_norm = rmean
        else:
            log.warning("risk weights are identically zero; normalizer left at 1")
        if dmean > 0:
            discomfort_norm = dmean
        else:
            log.warning("discomfort weights are identically zero; normalizer left at 1")
    excluded = ~np.isfinite(wsg.risk)
    with np.errstate(invalid="ignore"):
        fwd = alpha * (wsg.risk / risk_norm) + (1.0 - alpha) * (wsg.discomfort_fwd / discomfort_norm)
        bwd = alpha * (wsg.risk / risk_norm) + (1.0 - alpha) * (wsg.discomfort_bwd / discomfort_norm)
    # flagged edges stay unroutable at every alpha, including alpha = 0
    fwd[excluded] = np.inf
    bwd[excluded] = np.inf
    return EdgeCosts(alpha, fwd, bwd, risk_norm, discomfort_norm)


def nearest_node(graph: StreetGraph, p: GeoPoint, warn_distance_m: float = NEAREST_NODE_WARN_M) -> int:
    """Node minimizing geodesic distance to ``p``; ties go to the lowest id."""
    if len(graph) == 0:
        raise RoutingError("graph has no nodes")
    lat1 = math.radians(p.lat)
    lats = np.radians(graph.node_lats)
    dphi = lats - lat1
    dlam = np.radians(graph.node_lons - p.lon)
    a = np.sin(dphi / 2.0) ** 2 + math.cos(lat1) * np.cos(lats) * np.sin(dlam / 2.0) ** 2
    d = 2.0 * EARTH_RADIUS_M * np.arcsin(np.sqrt(np.minimum(a, 1.0)))
    idx = int(np.argmin(d))
    if d[idx] > warn_distance_m:
        log.warning("query point (%.6f, %.6f) is %.0f m from the nearest network node", p.lat, p.lon, d[idx])
    return idx


def shortest_path(wsg: WeightedStreetGraph, costs: EdgeCosts, src: int, dst: int) -> tuple[float, tuple[int, ...], tuple[int, ...]]:
    """Least-cost path from src to dst; ties broken by node-sequence order.

    Returns the accumulated cost, the node sequence, and the edge ids.
    """
    g = wsg.graph
    best: dict[int, float] = {src: 0.0}
    done: set[int] = set()
    heap: list[tuple[float, tuple[int, ...], tuple[int, ...]]] = [(0.0, (src,), ())]
    while heap:
        cost, nodes, edges = heapq.heappop(heap)
        cur = nodes[-1]
        if cur in done:
            continue
        done.add(cur)
        if cur == dst:
            return cost, nodes, edges
        for eid, nxt in g.neighbors(cur):
            if nxt in done:
                continue
            step = costs.from_node(g.edges[eid].u, cur, eid)
            if not math.isfinite(step):
                continue
            total = cost + step
            known = best.get(nxt)
            if known is not None and total > known:
                continue
            best[nxt] = total
            heapq.heappush(heap, (total, nodes + (nxt,), edges + (eid,)))
    raise NoRouteError(f"node {dst} is not reachable from node {src}")


def _totals(wsg: WeightedStreetGraph, nodes: tuple[int, ...], edges: tuple[int, ...]) -> tuple[float, float, float]:
    g = wsg.graph
    risk = disc = length = 0.0
    for i, eid in enumerate(edges):
        e = g.edges[eid]
        risk += float(wsg.risk[eid])
        disc += wsg.discomfort(eid, nodes[i])
        length += e.length_m
    return risk, disc, length


def find_route(wsg: WeightedStreetGraph, query: RouteQuery, normalize: bool = True) -> Route:
    """Minimum blended-cost route through the query's matched anchor nodes.

    Waypoints split the query into independently optimal legs. Totals are
    reported on the raw weights; the blended cost uses the normalized weights
    the search ran on.
    """
    wsg.require_ready()
    costs = blend_weights(wsg, query.alpha, normalize=normalize)
    anchors = [nearest_node(wsg.graph, p) for p in (query.departure, *query.waypoints, query.destination)]
    nodes: tuple[int, ...] = (anchors[0],)
    edges: tuple[int, ...] = ()
    for a, b in zip(anchors, anchors[1:]):
        if a == b:
            continue
        _, leg_nodes, leg_edges = shortest_path(wsg, costs, a, b)
        nodes = nodes + leg_nodes[1:]
        edges = edges + leg_edges
    risk, disc, length = _totals(wsg, nodes, edges)
    blended = query.alpha * (risk / costs.risk_norm) + (1.0 - query.alpha) * (disc / costs.discomfort_norm)
    return Route(nodes, edges, risk, disc, length, total_cost=blended, alpha=query.alpha)


def route_coordinates(route: Route, graph: StreetGraph) -> list[tuple[float, float]]:
    return [(graph.nodes[i].lat, graph.nodes[i].lon) for i in route.nodes]


def export_route_txt(route: Route, graph: StreetGraph) -> str:
    """Plain-text export: one "lat,lon" per node, then the two weight totals.

    The format is a stable contract: coordinates printed with %.6f, LF line
    endings, totals labeled ``risk=`` and ``discomfort=``.
    """
    lines = ["%.6f,%.6f" % (lat, lon) for lat, lon in route_coordinates(route, graph)]
    lines.append("risk=%.6f" % route.total_risk)
    lines.append("discomfort=%.6f" % route.total_discomfort)
    return "\n".join(lines) + "\n"


def route_to_dict(route: Route, graph: StreetGraph) -> dict:
    return {
        "nodes": list(route.nodes),
        "coordinates": [[lat, lon] for lat, lon in route_coordinates(route, graph)],
        "total_risk": route.total_risk,
        "total_discomfort": route.total_discomfort,
        "total_length_m": route.total_length_m,
        "total_cost": route.total_cost,
        "alpha": route.alpha,
    }


def export_route_json(route: Route, graph: StreetGraph) -> str:
    return json.dumps(route_to_dict(route, graph))


def export_route_geojson(route: Route, graph: StreetGraph) -> str:
    coords = [[lon, lat] for lat, lon in route_coordinates(route, graph)]
    doc = {
        "type": "Feature",
        "geometry": {"type": "LineString", "coordinates": coords},
        "properties": {
            "total_risk": route.total_risk,
            "total_discomfort": route.total_discomfort,
            "total_length_m": route.total_length_m,
            "alpha": route.alpha,
        },
    }
    return json.dumps(doc)


def import_route_txt(source: str | IO[str], wsg: WeightedStreetGraph) -> Route:
    """Rebuild a route from its text export by nearest-node matching.

    Consecutive coordinates must match adjacent graph nodes. Totals are
    recomputed from the graph weights, so a re-import of an export round-trips
    to an identical route. Between parallel edges the lowest edge id wins.
    """
    wsg.require_ready()
    text = source if isinstance(source, str) else source.read()
    coords: list[GeoPoint] = []
    for line in text.splitlines():
        line = line.strip()
        if not line or "=" in line:
            continue
        try:
            lat_s, lon_s = line.split(",")
            coords.append(GeoPoint(float(lat_s), float(lon_s)))
        except ValueError as exc:
            raise DataError(f"malformed route line {line!r}: {exc}") from exc
    if not coords:
        raise DataError("route file contains no coordinates")
    g = wsg.graph
    matched = [nearest_node(g, p) for p in coords]
    nodes: list[int] = [matched[0]]
    for n in matched[1:]:
        if n != nodes[-1]:
            nodes.append(n)
    edges: list[int] = []
    for a, b in zip(nodes, nodes[1:]):
        connecting = sorted(eid for eid, other in g.neighbors(a) if other == b)
        if not connecting:
            raise DataError(f"route nodes {a} and {b} are not adjacent in the street graph")
        edges.append(connecting[0])
    risk, disc, length = _totals(wsg, tuple(nodes), tuple(edges))
    return Route(tuple(nodes), tuple(edges), risk, disc, length)
