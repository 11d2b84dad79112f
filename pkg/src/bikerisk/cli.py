"""Batch command-line entry points for the pipeline and the studies.

Every artifact the commands emit round-trips through the package's loaders,
and a run is fully determined by the config file and the seed, so repeated
invocations produce byte-identical outputs. Exit code 1 marks a validation
failure (bad flags or config), 2 a data error.
"""

from __future__ import annotations

import json
import sys
import time
from pathlib import Path

import click

from .analytics import (
    GROUPINGS,
    UtilizationDelta,
    climate_join_to_csv,
    compare_baselines,
    curve_to_csv,
    join_climate,
    load_climate_csv,
    severity_stats,
    simulate_od,
    stats_to_csv,
    utilization_to_geojson,
)
from .config import load_config, require_paths
from .density import box_cox
from .errors import BikeriskError, ConfigError
from .geo import GeoPoint
from .gridio import load_grid, save_grid
from .graph import load_weighted_graph, save_weighted_graph
from .ingest.accidents import AccidentSchema, load_accidents
from .pipeline import run_ingest, run_pipeline
from .riskmap import extract_contours
from .router import (
    RouteQuery,
    export_route_geojson,
    export_route_json,
    export_route_txt,
    find_route,
    import_route_txt,
)

GRID_FILE = "risk_grid.json"
GRAPH_FILE = "weighted_graph.json"


def _parse_point(_ctx, _param, value):
    if value is None:
        return None
    try:
        lat_s, lon_s = value.split(",")
        return GeoPoint(float(lat_s), float(lon_s))
    except ValueError as exc:
        raise click.BadParameter(f"expected lat,lon; got {value!r} ({exc})")


def _parse_points(_ctx, _param, values):
    return tuple(_parse_point(None, None, v) for v in values)


def _parse_alphas(_ctx, _param, value):
    try:
        alphas = [float(x) for x in value.split(",") if x.strip() != ""]
    except ValueError as exc:
        raise click.BadParameter(f"expected comma-separated numbers, got {value!r} ({exc})")
    if not alphas:
        raise click.BadParameter("need at least one alpha")
    for a in alphas:
        if not 0.0 <= a <= 1.0:
            raise click.BadParameter(f"alpha {a} outside [0, 1]")
    return alphas


def _parse_levels(_ctx, _param, value):
    try:
        levels = [float(x) for x in value.split(",") if x.strip() != ""]
    except ValueError as exc:
        raise click.BadParameter(f"expected comma-separated numbers, got {value!r} ({exc})")
    if not levels or any(b <= a for a, b in zip(levels, levels[1:])):
        raise click.BadParameter("levels must be a strictly increasing non-empty list")
    return levels


def _alpha_option():
    def check(_ctx, _param, value):
        if not 0.0 <= value <= 1.0:
            raise click.BadParameter(f"alpha {value} outside [0, 1]")
        return value

    return click.option("--alpha", type=float, default=0.3, show_default=True, callback=check,
                        help="risk/comfort preference, 0 = comfort only, 1 = safety only")


config_option = click.option(
    "--config", "config_path", envvar="BIKERISK_CONFIG", required=True,
    type=click.Path(exists=True, dir_okay=False), help="pipeline config JSON",
)
out_option = click.option(
    "--out", "out_dir", default="out", show_default=True, type=click.Path(file_okay=False),
    help="output directory",
)


@click.group()
def cli():
    """Cycling risk estimation and route recommendation toolkit."""


def _artifacts(cfg, artifacts_dir: Path):
    """Load the precomputed grid and weighted graph, or compute them fresh."""
    grid_path = artifacts_dir / GRID_FILE
    graph_path = artifacts_dir / GRAPH_FILE
    if grid_path.exists() and graph_path.exists():
        with open(graph_path, encoding="utf-8") as fp:
            wsg = load_weighted_graph(fp)
        return load_grid(grid_path), wsg
    click.echo("precomputed artifacts not found; running the estimation pipeline", err=True)
    result = run_pipeline(cfg)
    return result.surface.risk, result.weighted


@cli.command()
@config_option
@out_option
def ingest(config_path, out_dir):
    """Validate and normalize the configured input files."""
    cfg = load_config(config_path)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    bundle = run_ingest(cfg)
    acc = bundle.accidents
    rows = ["id,lat,lon,severity,cause,year,month,weekday,hour,street_type"]
    for r in acc.records:
        rows.append(
            f"{r.id},{r.location.lat:.7f},{r.location.lon:.7f},{r.severity.value},{r.cause.value},"
            f"{r.year},{r.month},{r.weekday},{r.hour},{r.street_type}"
        )
    (out / "normalized_accidents.csv").write_text("\n".join(rows) + "\n", encoding="utf-8")
    report = {
        "accidents": {
            "records": len(acc.records),
            "by_severity": {s.value: c for s, c in acc.count_by_severity().items()},
            "row_errors": [[i, msg] for i, msg in acc.row_errors],
            "dropped_outside_bbox": acc.dropped_outside,
            "duplicate_ids": acc.duplicate_ids,
        },
        "traces": {
            "samples": len(bundle.traces.samples),
            "removed_non_bike": bundle.traces.removed_non_bike,
            "dropped_outside_window": bundle.traces.dropped_outside,
            "skipped_files": bundle.traces.skipped_files,
        },
        "network": {
            "nodes": len(bundle.network.graph.nodes),
            "edges": len(bundle.network.graph.edges),
            "raw_points": bundle.network.raw_point_count,
            "raw_segments": bundle.network.raw_segment_count,
            "dropped_zero_length": bundle.network.dropped_zero_length,
            "component_sizes": bundle.network.component_sizes,
        },
    }
    (out / "ingest_report.json").write_text(json.dumps(report, indent=2) + "\n", encoding="utf-8")
    click.echo(
        f"ingested {len(acc.records)} accidents, {len(bundle.traces.samples)} trace points, "
        f"{len(bundle.network.graph.nodes)} nodes / {len(bundle.network.graph.edges)} edges"
    )


@cli.command()
@config_option
@out_option
def estimate(config_path, out_dir):
    """Run the full estimation and write the risk grid and weighted graph."""
    cfg = load_config(config_path)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    result = run_pipeline(cfg)
    save_grid(result.surface.risk, out / GRID_FILE)
    with open(out / GRAPH_FILE, "w", encoding="utf-8") as fp:
        save_weighted_graph(result.weighted, fp)
    click.echo(f"estimation finished in {time.perf_counter() - t0:.1f} s; artifacts in {out}", err=True)


@cli.command()
@config_option
@out_option
@click.option("--from", "departure", required=True, callback=_parse_point, help="departure lat,lon")
@click.option("--to", "destination", required=True, callback=_parse_point, help="destination lat,lon")
@click.option("--waypoint", "waypoints", multiple=True, callback=_parse_points, help="intermediate lat,lon (repeatable)")
@_alpha_option()
@click.option("--format", "fmt", type=click.Choice(["txt", "json", "geojson", "all"]), default="txt", show_default=True)
def route(config_path, out_dir, departure, destination, waypoints, alpha, fmt):
    """Recommend a route and export it."""
    cfg = load_config(config_path)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    _, wsg = _artifacts(cfg, out)
    rte = find_route(wsg, RouteQuery(departure, destination, waypoints, alpha))
    graph = wsg.graph
    if fmt in ("txt", "all"):
        (out / "route.txt").write_text(export_route_txt(rte, graph), encoding="utf-8")
    if fmt in ("json", "all"):
        (out / "route.json").write_text(export_route_json(rte, graph) + "\n", encoding="utf-8")
    if fmt in ("geojson", "all"):
        (out / "route.geojson").write_text(export_route_geojson(rte, graph) + "\n", encoding="utf-8")
    click.echo(
        f"route: {len(rte.nodes)} nodes, {rte.total_length_m:.0f} m, "
        f"risk={rte.total_risk:.6f} discomfort={rte.total_discomfort:.6f} (alpha={alpha})"
    )


@cli.command()
@config_option
@out_option
@click.option("--pairs", type=int, default=2000, show_default=True)
@click.option("--alphas", default="0,0.5,0.75", show_default=True, callback=_parse_alphas)
@click.option("--seed", type=int, default=7, show_default=True)
def simulate(config_path, out_dir, pairs, alphas, seed):
    """Random origin-destination study of street utilization per alpha."""
    if pairs < 1:
        raise click.BadParameter("--pairs must be >= 1")
    cfg = load_config(config_path)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    _, wsg = _artifacts(cfg, out)
    result = simulate_od(wsg, pairs, alphas, seed)
    ref = 0.0 if 0.0 in result.counts else alphas[0]
    for a, counts in result.counts.items():
        delta = result.deltas.get(a)
        if delta is None:
            delta = UtilizationDelta(ref, a, result.counts[ref], counts)
        doc = utilization_to_geojson(wsg, delta)
        name = ("%g" % a).replace(".", "_")
        (out / f"utilization_alpha_{name}.geojson").write_text(json.dumps(doc) + "\n", encoding="utf-8")
    summary = {
        "seed": seed,
        "pairs": pairs,
        "alphas": alphas,
        "resampled_pairs": result.resampled_pairs,
        "route_edge_totals": {("%g" % a): t for a, t in result.route_edge_totals.items()},
    }
    (out / "simulate_summary.json").write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")
    click.echo(f"simulated {pairs} OD pairs at alphas {alphas}; outputs in {out}")


@cli.command()
@config_option
@out_option
@click.option("--group", type=click.Choice(list(GROUPINGS)), required=True)
@click.option("--climate", "with_climate", is_flag=True,
              help="join the configured monthly climate table (month grouping only)")
def stats(config_path, out_dir, group, with_climate):
    """Severity statistics per group, as CSV."""
    if with_climate and group != "month":
        raise click.BadParameter("--climate requires --group month")
    cfg = load_config(config_path)
    require_paths(cfg, "accidents")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    schema = AccidentSchema(year_range=cfg.year_range, bbox=cfg.study_bbox())
    records = load_accidents(cfg.accidents, schema).records
    table = severity_stats(records, group)
    if with_climate:
        require_paths(cfg, "climate")
        climate = load_climate_csv(Path(cfg.climate).read_text(encoding="utf-8"))
        csv_text = climate_join_to_csv(join_climate(table, climate))
        (out / "stats_month_climate.csv").write_text(csv_text, encoding="utf-8")
    else:
        csv_text = stats_to_csv(table)
        (out / f"stats_{group}.csv").write_text(csv_text, encoding="utf-8")
    click.echo(csv_text, nl=False)


@cli.command()
@config_option
@out_option
@click.option("--levels", required=True, callback=_parse_levels, help="strictly increasing contour levels")
@click.option("--transform", type=click.Choice(["raw", "boxcox"]), default="raw", show_default=True)
def contours(config_path, out_dir, levels, transform):
    """Export marching-squares contours of the risk surface as GeoJSON."""
    cfg = load_config(config_path)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    risk_grid, _ = _artifacts(cfg, out)
    if transform == "boxcox":
        risk_grid = box_cox(risk_grid, cfg.box_cox_lambda)
    doc = extract_contours(risk_grid, levels)
    (out / "contours.geojson").write_text(json.dumps(doc) + "\n", encoding="utf-8")
    click.echo(f"wrote {len(doc['features'])} contour features for {len(levels)} levels")


@cli.command("compare-baselines")
@config_option
@out_option
@click.option("--dir", "baselines_dir", type=click.Path(exists=True, file_okay=False), default=None,
              help="directory of baseline route .txt files (defaults to the configured one)")
@click.option("--alphas", default="0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1", show_default=True, callback=_parse_alphas)
def compare_baselines_cmd(config_path, out_dir, baselines_dir, alphas):
    """Relative improvement of recommendations over baseline routes."""
    cfg = load_config(config_path)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    bdir = Path(baselines_dir) if baselines_dir else (Path(cfg.baselines_dir) if cfg.baselines_dir else None)
    if bdir is None or not bdir.exists():
        raise ConfigError("no baselines directory configured or given via --dir")
    _, wsg = _artifacts(cfg, out)
    baselines = []
    for path in sorted(bdir.glob("*.txt")):
        baselines.append(import_route_txt(path.read_text(encoding="utf-8"), wsg))
    if not baselines:
        raise ConfigError(f"no baseline .txt files in {bdir}")
    curve = compare_baselines(baselines, wsg, alphas)
    csv_text = curve_to_csv(curve)
    (out / "improvement_curve.csv").write_text(csv_text, encoding="utf-8")
    click.echo(csv_text, nl=False)


@cli.command()
@config_option
@click.option("--host", default=None, help="override the configured listen host")
@click.option("--port", type=int, default=None, help="override the configured listen port")
def serve(config_path, host, port):
    """Start the HTTP service (estimation runs once at startup)."""
    import uvicorn

    from .service import create_app

    cfg = load_config(config_path)
    if host:
        cfg.host = host
    if port:
        cfg.port = port
    app = create_app(cfg)
    uvicorn.run(app, host=cfg.host, port=cfg.port)


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.UsageError as exc:
        exc.show()
        return 1
    except click.ClickException as exc:
        exc.show()
        return exc.exit_code
    except click.Abort:
        return 130
    except ConfigError as exc:
        click.echo(f"error: {exc}", err=True)
        return 1
    except BikeriskError as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
