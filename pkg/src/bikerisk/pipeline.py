"""End-to-end orchestration: ingest, estimate, weight the street graph.

The risk surface is produced in the same order the data products depend on
each other: per-severity accident densities and the traffic density are
estimated on the extended window and renormalized to the study box, each
severity is divided by traffic (with the relative floor), and the resulting
conditional surfaces are mixed with the severity weights. The mixed surface
is what gets interpolated onto the street network; the power transform is a
display concern and never feeds routing.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass

from .config import PipelineConfig, require_paths
from .density import (
    EvaluationGrid,
    KernelParams,
    RiskGrid,
    estimate_density,
    estimate_partitioned,
    normalize_by_traffic,
    reweight,
)
from .discomfort import assign_edge_discomfort
from .graph import WeightedStreetGraph
from .ingest.accidents import AccidentLoadResult, AccidentSchema, Severity, load_accidents
from .ingest.network import NetworkBuildResult, build_street_graph
from .ingest.traces import TraceLoadResult, load_traces
from .riskmap import assign_edge_risk

log = logging.getLogger(__name__)


@dataclass
class IngestBundle:
    accidents: AccidentLoadResult
    traces: TraceLoadResult
    network: NetworkBuildResult


@dataclass
class SurfaceBundle:
    grid: EvaluationGrid
    risk: RiskGrid          # severity-weighted, traffic-normalized surface
    traffic: RiskGrid
    per_severity: dict[Severity, RiskGrid]


@dataclass
class PipelineArtifacts:
    config: PipelineConfig
    ingest: IngestBundle
    surface: SurfaceBundle
    weighted: WeightedStreetGraph


def run_ingest(cfg: PipelineConfig) -> IngestBundle:
    require_paths(cfg, "accidents", "traces", "network")
    grid = evaluation_grid(cfg)
    schema = AccidentSchema(year_range=cfg.year_range, bbox=cfg.study_bbox())
    accidents = load_accidents(cfg.accidents, schema)
    traces = load_traces(cfg.traces, bbox=grid.extended_window())
    network = build_street_graph(cfg.network)
    log.info(
        "ingested %d accidents, %d trace points, %d nodes / %d edges",
        len(accidents.records), len(traces.samples), len(network.graph.nodes), len(network.graph.edges),
    )
    return IngestBundle(accidents, traces, network)


def evaluation_grid(cfg: PipelineConfig) -> EvaluationGrid:
    return EvaluationGrid(cfg.study_bbox(), cfg.grid_nx, cfg.grid_ny, cfg.margin)


def estimate_surface(bundle: IngestBundle, cfg: PipelineConfig) -> SurfaceBundle:
    grid = evaluation_grid(cfg)
    params = KernelParams(cfg.bandwidth)

    partitions = {s: [] for s in Severity}
    for rec in bundle.accidents.records:
        partitions[rec.severity].append(rec.location)
    t0 = time.perf_counter()
    joint = estimate_partitioned(partitions, grid, params, renormalize=True)
    traffic = estimate_density([s.location for s in bundle.traces.samples], grid, params, renormalize=True)

    per_severity = {
        s: normalize_by_traffic(joint[s], traffic, cfg.traffic_floor) for s in joint
    }
    weights = cfg.severity_weights()
    weight_map = {Severity.LIGHT: weights.a_light, Severity.SEVERE: weights.a_severe, Severity.DEATH: weights.a_death}
    risk = reweight(per_severity, weight_map)
    log.info("estimated risk surface in %.1f s", time.perf_counter() - t0)
    return SurfaceBundle(grid, risk, traffic, per_severity)


def build_weighted_graph(surface: SurfaceBundle, network: NetworkBuildResult, cfg: PipelineConfig) -> WeightedStreetGraph:
    wsg = assign_edge_risk(surface.risk, network.graph)
    return assign_edge_discomfort(wsg, cfg.discomfort.to_params())


def run_pipeline(cfg: PipelineConfig) -> PipelineArtifacts:
    bundle = run_ingest(cfg)
    surface = estimate_surface(bundle, cfg)
    weighted = build_weighted_graph(surface, bundle.network, cfg)
    return PipelineArtifacts(cfg, bundle, surface, weighted)
