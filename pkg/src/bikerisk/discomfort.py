"""Physical-effort cost of traversing an edge, from length and grade.

The cost grows linearly with length and exponentially with grade, and is held
constant below the grade floor: descending steeper than the floor gives a
cyclist no further relief. At zero grade the cost equals the length exactly.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .graph import StreetGraph, WeightedStreetGraph

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class DiscomfortParams:
    grade_floor: float = -0.025
    rate: float = 15.0
    amplitude: float = 2.0

    def __post_init__(self) -> None:
        if not self.grade_floor < 0:
            raise ConfigError("grade floor must be negative")
        if not self.rate > 0:
            raise ConfigError("exponential rate must be positive")
        if not self.amplitude > 1:
            raise ConfigError("amplitude must exceed 1")


DEFAULT_PARAMS = DiscomfortParams()


def discomfort(d: float, x: float, params: DiscomfortParams = DEFAULT_PARAMS) -> float:
    """Effort weight of a street of length ``d`` meters and average grade ``x``."""
    if d < 0:
        raise ValueError(f"length must be non-negative, got {d}")
    if not -1.0 <= x <= 1.0:
        raise ValueError(f"grade must lie in [-1, 1], got {x}")
    g = max(x, params.grade_floor)
    return d * (params.amplitude * math.exp(params.rate * g) - 1.0)


def assign_edge_discomfort(
    graph: StreetGraph | WeightedStreetGraph,
    params: DiscomfortParams = DEFAULT_PARAMS,
) -> WeightedStreetGraph:
    """Populate both directed discomfort weights of every edge.

    Grade flips sign with traversal direction, so each edge stores one weight
    per orientation and the router sees asymmetric costs on slopes.
    """
    wsg = graph if isinstance(graph, WeightedStreetGraph) else WeightedStreetGraph(graph)
    g = wsg.graph
    lengths = np.array([e.length_m for e in g.edges])
    grades = np.array([e.grade for e in g.edges])
    fwd = lengths * (params.amplitude * np.exp(params.rate * np.maximum(grades, params.grade_floor)) - 1.0)
    bwd = lengths * (params.amplitude * np.exp(params.rate * np.maximum(-grades, params.grade_floor)) - 1.0)
    wsg.discomfort_fwd = fwd
    wsg.discomfort_bwd = bwd
    return wsg
