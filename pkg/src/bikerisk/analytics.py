"""Accident statistics, baseline comparisons, and street-utilization studies.

Death records merge into the severe class for statistics only; whether a
crash kills rather than severely injures says more about the victim than the
site, and the death group is far too small to carry its own error bars. The
risk surface itself keeps the three classes separate.
"""

from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DataError, NoRouteError
from .graph import WeightedStreetGraph
from .ingest.accidents import AccidentRecord, Severity
from .router import Route, RouteQuery, find_route
from .geo import GeoPoint

log = logging.getLogger(__name__)

GROUPINGS = ("year", "month", "hourweekday", "cause")


@dataclass(frozen=True)
class GroupStats:
    key: tuple
    n: int
    n_severe: int  # severe and death records combined
    p: float
    sigma: float


@dataclass
class SeverityStats:
    grouping: str
    groups: list[GroupStats]

    @property
    def total(self) -> int:
        return sum(g.n for g in self.groups)


def _group_key(record: AccidentRecord, grouping: str) -> tuple:
    if grouping == "year":
        return (record.year,)
    if grouping == "month":
        return (record.month,)
    if grouping == "hourweekday":
        return (record.weekday, record.hour)
    if grouping == "cause":
        return (record.cause.value,)
    raise DataError(f"unknown grouping {grouping!r}; expected one of {GROUPINGS}")


def severity_stats(records: Sequence[AccidentRecord], grouping: str) -> SeverityStats:
    """Per-group accident counts with the severe fraction and its standard error.

    The error bars treat severity as a Bernoulli draw per accident, so
    ``sigma = sqrt(p (1 - p) / N)`` with N the group size.
    """
    if not records:
        raise DataError("no accident records to analyze")
    buckets: dict[tuple, list[int]] = {}
    for r in records:
        counts = buckets.setdefault(_group_key(r, grouping), [0, 0])
        counts[0] += 1
        if r.severity in (Severity.SEVERE, Severity.DEATH):
            counts[1] += 1
    groups = []
    for key in sorted(buckets):
        n, n_severe = buckets[key]
        p = n_severe / n
        groups.append(GroupStats(key, n, n_severe, p, math.sqrt(p * (1.0 - p) / n)))
    return SeverityStats(grouping, groups)


@dataclass(frozen=True)
class ClimateMonth:
    month: int
    temperature_c: float
    precipitation_mm: float


def load_climate_csv(source) -> list[ClimateMonth]:
    text = source if isinstance(source, str) else source.read()
    rows = []
    try:
        for row in csv.DictReader(io.StringIO(text)):
            rows.append(ClimateMonth(int(row["month"]), float(row["temperature_c"]), float(row["precipitation_mm"])))
    except (KeyError, ValueError) as exc:
        raise DataError(f"malformed climate table: {exc}") from exc
    return rows


def join_climate(stats: SeverityStats, climate: Iterable[ClimateMonth]) -> list[dict]:
    """Month-keyed join of accident stats with the climate table, for export."""
    if stats.grouping != "month":
        raise DataError("climate join requires monthly statistics")
    by_month = {c.month: c for c in climate}
    missing = [m for m in range(1, 13) if m not in by_month]
    if missing:
        raise DataError(f"climate table is missing months: {missing}")
    out = []
    for g in stats.groups:
        month = g.key[0]
        c = by_month[month]
        out.append(
            {
                "month": month,
                "n": g.n,
                "n_severe": g.n_severe,
                "p": g.p,
                "sigma": g.sigma,
                "temperature_c": c.temperature_c,
                "precipitation_mm": c.precipitation_mm,
            }
        )
    return out


@dataclass
class ImprovementCurve:
    alphas: list[float]
    risk_improvement: list[float]
    discomfort_improvement: list[float]
    mean_improvement: list[float]
    baselines_used: int
    baselines_excluded: int


def _relative_improvement(baseline: float, recommended: float) -> float:
    if baseline <= 0:
        raise ZeroDivisionError("baseline total is not positive")
    return (baseline - recommended) / baseline


def compare_baselines(
    baselines: Sequence[Route],
    wsg: WeightedStreetGraph,
    alphas: Sequence[float],
) -> ImprovementCurve:
    """Average relative improvement of recommendations over baseline routes.

    For each alpha, a route is recommended between every baseline's endpoints
    and compared on raw risk and discomfort totals. Per-route improvements are
    averaged over baselines first; the mean curve is the midpoint of the two
    averaged curves.
    """
    g = wsg.graph
    usable: list[Route] = []
    excluded = 0
    for b in baselines:
        if b.total_risk <= 0 or b.total_discomfort <= 0 or len(b.nodes) < 2:
            excluded += 1
            continue
        usable.append(b)
    risk_curve = []
    disc_curve = []
    for alpha in alphas:
        risk_imps = []
        disc_imps = []
        for b in usable:
            dep = GeoPoint(g.nodes[b.nodes[0]].lat, g.nodes[b.nodes[0]].lon)
            dst = GeoPoint(g.nodes[b.nodes[-1]].lat, g.nodes[b.nodes[-1]].lon)
            try:
                rec = find_route(wsg, RouteQuery(dep, dst, alpha=alpha))
            except NoRouteError:
                excluded += 1
                log.warning("baseline with unreachable endpoints excluded: %s -> %s", b.nodes[0], b.nodes[-1])
                continue
            risk_imps.append(_relative_improvement(b.total_risk, rec.total_risk))
            disc_imps.append(_relative_improvement(b.total_discomfort, rec.total_discomfort))
        if not risk_imps:
            raise DataError("no baseline could be routed")
        risk_curve.append(float(np.mean(risk_imps)))
        disc_curve.append(float(np.mean(disc_imps)))
    mean_curve = [(r + d) / 2.0 for r, d in zip(risk_curve, disc_curve)]
    return ImprovementCurve(list(alphas), risk_curve, disc_curve, mean_curve, len(usable), excluded)


@dataclass
class UtilizationDelta:
    """Per-edge traversal counts under two preference settings."""

    alpha_ref: float
    alpha_cmp: float
    count_ref: np.ndarray
    count_cmp: np.ndarray

    @property
    def delta(self) -> np.ndarray:
        return self.count_cmp - self.count_ref


@dataclass
class SimulationResult:
    seed: int
    pairs: list[tuple[int, int]]
    counts: dict[float, np.ndarray]
    deltas: dict[float, UtilizationDelta]
    resampled_pairs: int
    route_edge_totals: dict[float, int]


def simulate_od(
    wsg: WeightedStreetGraph,
    n_pairs: int,
    alphas: Sequence[float],
    seed: int,
) -> SimulationResult:
    """Route seeded-random OD pairs at each alpha and count edge traversals.

    Pairs are drawn uniformly over the nodes of the largest connected
    component; degenerate or unreachable pairs are resampled (and counted).
    Deltas compare each alpha against the alpha = 0 reference.
    """
    if n_pairs < 1:
        raise DataError("need at least one OD pair")
    if not alphas:
        raise DataError("need at least one alpha")
    wsg.require_ready()
    g = wsg.graph
    component = np.array(g.largest_component())
    if component.size < 2:
        raise DataError("largest component too small to sample OD pairs")
    rng = np.random.default_rng(seed)

    ref_alpha = 0.0 if 0.0 in [float(a) for a in alphas] else float(alphas[0])
    if ref_alpha != 0.0:
        log.warning("alpha=0 not among the requested alphas; deltas reference alpha=%s", ref_alpha)

    pairs: list[tuple[int, int]] = []
    resampled = 0
    counts = {float(a): np.zeros(len(g.edges), dtype=int) for a in alphas}
    totals = {float(a): 0 for a in alphas}
    while len(pairs) < n_pairs:
        dep, dst = (int(component[i]) for i in rng.integers(0, component.size, size=2))
        if dep == dst:
            resampled += 1
            continue
        try:
            routes = []
            for a in alphas:
                q = RouteQuery(
                    GeoPoint(g.nodes[dep].lat, g.nodes[dep].lon),
                    GeoPoint(g.nodes[dst].lat, g.nodes[dst].lon),
                    alpha=float(a),
                )
                routes.append((float(a), find_route(wsg, q)))
        except NoRouteError:
            resampled += 1
            continue
        pairs.append((dep, dst))
        for a, route in routes:
            for eid in route.edges:
                counts[a][eid] += 1
            totals[a] += len(route.edges)

    deltas = {
        a: UtilizationDelta(ref_alpha, a, counts[ref_alpha], counts[a])
        for a in counts
        if a != ref_alpha
    }
    if resampled:
        log.info("resampled %d degenerate or unreachable OD pairs", resampled)
    return SimulationResult(seed, pairs, counts, deltas, resampled, totals)


def stats_to_csv(stats: SeverityStats) -> str:
    key_cols = {"year": ["year"], "month": ["month"], "hourweekday": ["weekday", "hour"], "cause": ["cause"]}[
        stats.grouping
    ]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(key_cols + ["n", "n_severe", "p", "sigma"])
    for grp in stats.groups:
        writer.writerow(list(grp.key) + [grp.n, grp.n_severe, repr(grp.p), repr(grp.sigma)])
    return buf.getvalue()


def curve_to_csv(curve: ImprovementCurve) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["alpha", "risk_improvement", "discomfort_improvement", "mean_improvement"])
    for row in zip(curve.alphas, curve.risk_improvement, curve.discomfort_improvement, curve.mean_improvement):
        writer.writerow([repr(v) for v in row])
    return buf.getvalue()


def climate_join_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    cols = ["month", "n", "n_severe", "p", "sigma", "temperature_c", "precipitation_mm"]
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(cols)
    for row in rows:
        writer.writerow([row[c] for c in cols])
    return buf.getvalue()


def utilization_to_geojson(wsg: WeightedStreetGraph, delta: UtilizationDelta) -> dict:
    """Per-edge LineString features with traversal counts and the signed delta.

    Rendering uses a diverging scale centered on zero: increases in orange,
    decreases in purple.
    """
    g = wsg.graph
    features = []
    for e in g.edges:
        a, b = g.nodes[e.u], g.nodes[e.v]
        features.append(
            {
                "type": "Feature",
                "geometry": {"type": "LineString", "coordinates": [[a.lon, a.lat], [b.lon, b.lat]]},
                "properties": {
                    "edge": e.id,
                    "count_ref": int(delta.count_ref[e.id]),
                    "count_cmp": int(delta.count_cmp[e.id]),
                    "delta": int(delta.delta[e.id]),
                },
            }
        )
    return {
        "type": "FeatureCollection",
        "features": features,
        "metadata": {
            "alpha_ref": delta.alpha_ref,
            "alpha_cmp": delta.alpha_cmp,
            "increase_color": "orange",
            "decrease_color": "purple",
        },
    }
