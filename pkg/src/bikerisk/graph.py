"""Street network graph structures shared by ingestion, weighting, and routing.

Nodes are intersections (or dead ends) with an altitude; edges are undirected
street segments carrying a length and an average grade oriented from ``u`` to
``v``. Parallel edges between the same node pair are allowed and keep distinct
ids; self-loops are not.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import IO, Iterable

import numpy as np

from .errors import DataError


@dataclass(frozen=True)
class StreetNode:
    id: int
    lat: float
    lon: float
    alt: float


@dataclass(frozen=True)
class StreetEdge:
    id: int
    u: int
    v: int
    length_m: float
    grade: float  # signed rise/run for traversal u -> v, clamped to [-1, 1]

    def other(self, node: int) -> int:
        return self.v if node == self.u else self.u


class StreetGraph:
    """Immutable undirected multigraph over street intersections."""

    def __init__(self, nodes: Iterable[StreetNode], edges: Iterable[StreetEdge]):
        self.nodes: list[StreetNode] = list(nodes)
        self.edges: list[StreetEdge] = list(edges)
        n = len(self.nodes)
        for i, node in enumerate(self.nodes):
            if node.id != i:
                raise DataError(f"node ids must be contiguous indices, got {node.id} at {i}")
        self._adj: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        for e in self.edges:
            if not (0 <= e.u < n and 0 <= e.v < n):
                raise DataError(f"edge {e.id} references unknown node")
            if e.u == e.v:
                raise DataError(f"edge {e.id} is a self-loop")
            if not e.length_m > 0:
                raise DataError(f"edge {e.id} has non-positive length")
            if not -1.0 <= e.grade <= 1.0:
                raise DataError(f"edge {e.id} grade outside [-1, 1]")
            self._adj[e.u].append((e.id, e.v))
            self._adj[e.v].append((e.id, e.u))
        self._lats = np.array([nd.lat for nd in self.nodes])
        self._lons = np.array([nd.lon for nd in self.nodes])

    def __len__(self) -> int:
        return len(self.nodes)

    def neighbors(self, node: int) -> list[tuple[int, int]]:
        """(edge_id, other_node) pairs incident to ``node``."""
        return self._adj[node]

    def degree(self, node: int) -> int:
        return len(self._adj[node])

    @property
    def node_lats(self) -> np.ndarray:
        return self._lats

    @property
    def node_lons(self) -> np.ndarray:
        return self._lons

    def total_length_m(self) -> float:
        return float(sum(e.length_m for e in self.edges))

    def connected_components(self) -> list[list[int]]:
        """Components as node-id lists, largest first (ties by smallest node id)."""
        seen = [False] * len(self.nodes)
        comps: list[list[int]] = []
        for start in range(len(self.nodes)):
            if seen[start]:
                continue
            comp = [start]
            seen[start] = True
            stack = [start]
            while stack:
                cur = stack.pop()
                for _, nxt in self._adj[cur]:
                    if not seen[nxt]:
                        seen[nxt] = True
                        comp.append(nxt)
                        stack.append(nxt)
            comps.append(sorted(comp))
        comps.sort(key=lambda c: (-len(c), c[0]))
        return comps

    def largest_component(self) -> list[int]:
        comps = self.connected_components()
        return comps[0] if comps else []


@dataclass
class WeightedStreetGraph:
    """Street graph with per-edge risk and direction-sensitive discomfort weights.

    ``risk`` is symmetric. Discomfort depends on the sign of the grade, so it is
    stored once per traversal direction: ``discomfort_fwd[e]`` applies when edge
    ``e`` is traversed u -> v and ``discomfort_bwd[e]`` when traversed v -> u.
    Edges excluded from routing (e.g. endpoints outside the risk grid) carry an
    infinite risk weight.
    """

    graph: StreetGraph
    risk: np.ndarray | None = None
    discomfort_fwd: np.ndarray | None = None
    discomfort_bwd: np.ndarray | None = None

    @property
    def ready(self) -> bool:
        return self.risk is not None and self.discomfort_fwd is not None and self.discomfort_bwd is not None

    def require_ready(self) -> None:
        if not self.ready:
            raise DataError("graph weights incomplete: assign risk and discomfort before routing")

    def discomfort(self, edge_id: int, from_node: int) -> float:
        e = self.graph.edges[edge_id]
        arr = self.discomfort_fwd if from_node == e.u else self.discomfort_bwd
        return float(arr[edge_id])


def weighted_graph_to_dict(wsg: WeightedStreetGraph) -> dict:
    """JSON-ready weighted-graph document (nodes, edges with weights)."""
    wsg.require_ready()
    g = wsg.graph
    return {
        "nodes": [[nd.id, nd.lat, nd.lon, nd.alt] for nd in g.nodes],
        "edges": [
            {
                "id": e.id,
                "u": e.u,
                "v": e.v,
                "length_m": e.length_m,
                "grade": e.grade,
                "w_r": float(wsg.risk[e.id]),
                "w_d_fwd": float(wsg.discomfort_fwd[e.id]),
                "w_d_bwd": float(wsg.discomfort_bwd[e.id]),
            }
            for e in g.edges
        ],
    }


def weighted_graph_from_dict(doc: dict) -> WeightedStreetGraph:
    try:
        nodes = [StreetNode(int(i), float(lat), float(lon), float(alt)) for i, lat, lon, alt in doc["nodes"]]
        edges = [
            StreetEdge(int(e["id"]), int(e["u"]), int(e["v"]), float(e["length_m"]), float(e["grade"]))
            for e in doc["edges"]
        ]
        risk = np.array([float(e["w_r"]) for e in doc["edges"]])
        dfwd = np.array([float(e["w_d_fwd"]) for e in doc["edges"]])
        dbwd = np.array([float(e["w_d_bwd"]) for e in doc["edges"]])
    except (KeyError, TypeError, ValueError) as exc:
        raise DataError(f"malformed weighted graph document: {exc}") from exc
    graph = StreetGraph(nodes, edges)
    return WeightedStreetGraph(graph, risk=risk, discomfort_fwd=dfwd, discomfort_bwd=dbwd)


def save_weighted_graph(wsg: WeightedStreetGraph, fp: IO[str]) -> None:
    json.dump(weighted_graph_to_dict(wsg), fp)


def load_weighted_graph(fp: IO[str]) -> WeightedStreetGraph:
    return weighted_graph_from_dict(json.load(fp))
