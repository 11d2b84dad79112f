"""Shared fixture builders and independent oracles for the test suite.

The routing oracles here are deliberately separate implementations: a plain
textbook least-cost search and a brute-force enumeration over simple paths.
They share nothing with the production search besides the graph structures.
"""

from __future__ import annotations

import heapq
import math

import numpy as np

from bikerisk.geo import BoundingBox, GeoPoint
from bikerisk.graph import StreetEdge, StreetGraph, StreetNode, WeightedStreetGraph


def build_wsg(coords, edge_list, risk, disc_fwd, disc_bwd=None):
    """Weighted graph from plain lists; discomfort defaults to symmetric."""
    nodes = [StreetNode(i, lat, lon, alt) for i, (lat, lon, alt) in enumerate(coords)]
    edges = [
        StreetEdge(i, u, v, length, grade)
        for i, (u, v, length, grade) in enumerate(edge_list)
    ]
    graph = StreetGraph(nodes, edges)
    risk = np.asarray(risk, dtype=float)
    disc_fwd = np.asarray(disc_fwd, dtype=float)
    disc_bwd = disc_fwd.copy() if disc_bwd is None else np.asarray(disc_bwd, dtype=float)
    return WeightedStreetGraph(graph, risk=risk, discomfort_fwd=disc_fwd, discomfort_bwd=disc_bwd)


def square_graph() -> WeightedStreetGraph:
    """Four nodes on a square: a cheap side path and an expensive one."""
    coords = [
        (0.0, 0.0, 400.0),
        (0.0, 0.002, 400.0),
        (0.002, 0.0, 400.0),
        (0.002, 0.002, 400.0),
    ]
    edges = [
        (0, 1, 220.0, 0.0),  # S - E1 (cheap risk)
        (1, 3, 220.0, 0.0),  # E1 - T
        (0, 2, 220.0, 0.0),  # S - E2 (cheap discomfort)
        (2, 3, 220.0, 0.0),  # E2 - T
    ]
    risk = [1.0, 1.0, 5.0, 5.0]
    disc = [6.0, 6.0, 1.5, 1.5]
    return build_wsg(coords, edges, risk, disc)


def two_path_fixture() -> tuple[WeightedStreetGraph, list[int], list[int]]:
    """Two disjoint three-edge paths between a shared origin and destination.

    Path A (nodes 0-1-2-3) has the lower discomfort, path B (0-4-5-3) the
    lower risk, so the optimal route switches from A to B at one crossover
    alpha computed from the normalized totals.
    """
    coords = [
        (0.0, 0.0, 400.0),
        (0.0005, 0.001, 400.0),
        (0.0005, 0.002, 400.0),
        (0.0, 0.003, 400.0),
        (-0.0005, 0.001, 400.0),
        (-0.0005, 0.002, 400.0),
    ]
    edges = [
        (0, 1, 120.0, 0.0),
        (1, 2, 120.0, 0.0),
        (2, 3, 120.0, 0.0),
        (0, 4, 120.0, 0.0),
        (4, 5, 120.0, 0.0),
        (5, 3, 120.0, 0.0),
    ]
    risk = [6.0, 6.0, 6.0, 2.0, 2.0, 2.0]
    disc = [2.0, 2.0, 2.0, 5.0, 5.0, 5.0]
    wsg = build_wsg(coords, edges, risk, disc)
    path_a = [0, 1, 2, 3]
    path_b = [0, 4, 5, 3]
    return wsg, path_a, path_b


def crossover_alpha(wsg: WeightedStreetGraph, edges_a, edges_b, risk_norm, disc_norm) -> float:
    """Alpha where the two paths' normalized blended costs coincide."""
    ra = sum(wsg.risk[e] for e in edges_a) / risk_norm
    rb = sum(wsg.risk[e] for e in edges_b) / risk_norm
    da = sum(wsg.discomfort_fwd[e] for e in edges_a) / disc_norm
    db = sum(wsg.discomfort_fwd[e] for e in edges_b) / disc_norm
    return (da - db) / ((rb - ra) + (da - db))


def random_wsg(seed: int, n_min: int = 5, n_max: int = 200) -> WeightedStreetGraph:
    """Random connected weighted graph with positive weights on both families."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(n_min, n_max + 1))
    lats = rng.uniform(0.0, 0.02, n)
    lons = rng.uniform(0.0, 0.02, n)
    coords = [(float(lats[i]), float(lons[i]), 400.0) for i in range(n)]
    edge_list = []
    for v in range(1, n):
        u = int(rng.integers(0, v))
        edge_list.append((u, v, float(rng.uniform(20.0, 400.0)), float(rng.uniform(-0.08, 0.08))))
    extra = int(rng.integers(0, max(1, n)))
    for _ in range(extra):
        u, v = rng.integers(0, n, size=2)
        if u == v:
            continue
        edge_list.append((int(u), int(v), float(rng.uniform(20.0, 400.0)), float(rng.uniform(-0.08, 0.08))))
    m = len(edge_list)
    risk = rng.uniform(0.05, 10.0, m)
    disc_fwd = rng.uniform(0.05, 10.0, m)
    disc_bwd = rng.uniform(0.05, 10.0, m)
    return build_wsg(coords, edge_list, risk, disc_fwd, disc_bwd)


def textbook_min_cost(wsg: WeightedStreetGraph, costs, src: int, dst: int) -> float | None:
    """Plain uniform-cost search returning only the optimal cost."""
    g = wsg.graph
    dist = {src: 0.0}
    visited = set()
    heap = [(0.0, src)]
    while heap:
        d, u = heapq.heappop(heap)
        if u in visited:
            continue
        visited.add(u)
        if u == dst:
            return d
        for eid, v in g.neighbors(u):
            e = g.edges[eid]
            c = costs.fwd[eid] if u == e.u else costs.bwd[eid]
            if not math.isfinite(c) or v in visited:
                continue
            nd = d + c
            if v not in dist or nd < dist[v]:
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    return None


def enumerate_min_cost(wsg: WeightedStreetGraph, costs, src: int, dst: int) -> float | None:
    """Exhaustive minimum over all simple paths; only usable on tiny graphs."""
    g = wsg.graph
    best = [None]

    def dfs(u: int, cost: float, on_path: set):
        if u == dst:
            if best[0] is None or cost < best[0]:
                best[0] = cost
            return
        for eid, v in g.neighbors(u):
            if v in on_path:
                continue
            e = g.edges[eid]
            c = costs.fwd[eid] if u == e.u else costs.bwd[eid]
            if not math.isfinite(c):
                continue
            on_path.add(v)
            dfs(v, cost + c, on_path)
            on_path.remove(v)

    dfs(src, 0.0, {src})
    return best[0]


def node_point(graph: StreetGraph, node_id: int) -> GeoPoint:
    nd = graph.nodes[node_id]
    return GeoPoint(nd.lat, nd.lon)


def unit_box() -> BoundingBox:
    return BoundingBox.from_extents(0.0, 0.0, 1.0, 1.0)
