"""HTTP service over the estimated risk surface and weighted street graph.

All heavy estimation happens once, in a background thread started with the
app, so the service answers 503 until the surface is ready and every later
query is a cheap interpolation or graph search over immutable state. Requests
never mutate shared state, so identical queries return identical results in
any order and concurrency.
"""

from __future__ import annotations

import logging
import threading
from contextlib import asynccontextmanager
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, HTTPException, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, PlainTextResponse

from .. import __version__
from ..analytics import severity_stats, stats_to_csv
from ..config import PipelineConfig, config_echo
from ..density import box_cox
from ..errors import NoRouteError
from ..geo import GeoPoint
from ..graph import weighted_graph_to_dict
from ..gridio import grid_to_dict
from ..pipeline import PipelineArtifacts, run_pipeline
from ..riskmap import extract_contours
from ..router import RouteQuery, export_route_txt, find_route, route_to_dict
from .schemas import GridResponse, HealthResponse, RouteRequest, RouteResponse

log = logging.getLogger(__name__)

_STATS_GROUPS = {"yearly": "year", "monthly": "month", "hourweekday": "hourweekday", "cause": "cause"}


class AppState:
    def __init__(self, config: PipelineConfig):
        self.config = config
        self.artifacts: Optional[PipelineArtifacts] = None
        self.error: Optional[str] = None

    @property
    def ready(self) -> bool:
        return self.artifacts is not None

    def require_ready(self) -> PipelineArtifacts:
        if self.error is not None:
            raise HTTPException(status_code=500, detail=f"startup estimation failed: {self.error}")
        if self.artifacts is None:
            raise HTTPException(status_code=503, detail="estimation still running; try again shortly")
        return self.artifacts


def _load(state: AppState) -> None:
    try:
        state.artifacts = run_pipeline(state.config)
        log.info("service ready")
    except Exception as exc:  # surfaced through /api/health, not swallowed
        log.exception("startup estimation failed")
        state.error = str(exc)


def create_app(config: PipelineConfig, precomputed: Optional[PipelineArtifacts] = None) -> FastAPI:
    state = AppState(config)
    if precomputed is not None:
        state.artifacts = precomputed

    @asynccontextmanager
    async def lifespan(_app: FastAPI):
        thread = None
        if state.artifacts is None and state.error is None:
            thread = threading.Thread(target=_load, args=(state,), daemon=True, name="bikerisk-startup")
            thread.start()
        yield
        if thread is not None:
            thread.join(timeout=0.1)

    app = FastAPI(title="bikerisk", version=__version__, lifespan=lifespan)
    app.state.bikerisk = state

    if config.cors_origins:
        app.add_middleware(
            CORSMiddleware,
            allow_origins=config.cors_origins,
            allow_methods=["*"],
            allow_headers=["*"],
        )

    @app.exception_handler(RequestValidationError)
    async def _validation_handler(_request: Request, exc: RequestValidationError):
        # Malformed queries are client errors, reported with field-level detail.
        return JSONResponse(status_code=400, content={"detail": exc.errors()})

    @app.get("/api/health")
    async def health():
        if state.error is not None:
            return JSONResponse(status_code=500, content={"status": "error", "detail": state.error})
        if not state.ready:
            return JSONResponse(status_code=503, content={"status": "loading"})
        art = state.artifacts
        body = HealthResponse(
            status="ok",
            version=__version__,
            config=config_echo(state.config),
            counts={
                "nodes": len(art.weighted.graph.nodes),
                "edges": len(art.weighted.graph.edges),
                "accidents": len(art.ingest.accidents.records),
                "trace_points": len(art.ingest.traces.samples),
            },
        )
        return JSONResponse(content=body.model_dump())

    def _route(req: RouteRequest):
        art = state.require_ready()
        query = RouteQuery(
            GeoPoint(req.from_.lat, req.from_.lon),
            GeoPoint(req.to.lat, req.to.lon),
            tuple(GeoPoint(w.lat, w.lon) for w in req.waypoints),
            req.alpha,
        )
        try:
            return find_route(art.weighted, query), art.weighted.graph
        except NoRouteError as exc:
            raise HTTPException(status_code=404, detail=str(exc))

    @app.post("/api/route", response_model=RouteResponse)
    def api_route(req: RouteRequest):
        route, graph = _route(req)
        return RouteResponse(**route_to_dict(route, graph))

    @app.post("/api/route/export")
    def api_route_export(req: RouteRequest):
        route, graph = _route(req)
        return PlainTextResponse(export_route_txt(route, graph))

    @app.get("/api/risk", response_model=GridResponse)
    def api_risk(transform: str = Query("raw", pattern="^(raw|boxcox)$")):
        art = state.require_ready()
        grid = art.surface.risk
        if transform == "boxcox":
            grid = box_cox(grid, state.config.box_cox_lambda)
        return GridResponse(**grid_to_dict(grid), transform=transform)

    @app.get("/api/contours")
    def api_contours(
        levels: str = Query(..., description="comma-separated strictly increasing levels"),
        transform: str = Query("raw", pattern="^(raw|boxcox)$"),
    ):
        art = state.require_ready()
        try:
            values = [float(x) for x in levels.split(",") if x.strip() != ""]
        except ValueError:
            raise HTTPException(status_code=400, detail="levels must be comma-separated numbers")
        if not values or any(b <= a for a, b in zip(values, values[1:])):
            raise HTTPException(status_code=400, detail="levels must be strictly increasing and non-empty")
        grid = art.surface.risk
        if transform == "boxcox":
            grid = box_cox(grid, state.config.box_cox_lambda)
        return JSONResponse(content=extract_contours(grid, values))

    @app.get("/api/network")
    def api_network():
        art = state.require_ready()
        return JSONResponse(content=weighted_graph_to_dict(art.weighted))

    @app.get("/api/stats/{grouping}")
    def api_stats(grouping: str, format: str = Query("json", pattern="^(json|csv)$")):
        art = state.require_ready()
        if grouping not in _STATS_GROUPS:
            raise HTTPException(status_code=400, detail=f"unknown grouping; expected one of {sorted(_STATS_GROUPS)}")
        table = severity_stats(art.ingest.accidents.records, _STATS_GROUPS[grouping])
        if format == "csv":
            return PlainTextResponse(stats_to_csv(table), media_type="text/csv")
        key_cols = {"year": ["year"], "month": ["month"], "hourweekday": ["weekday", "hour"], "cause": ["cause"]}[
            table.grouping
        ]
        rows = [
            {"key": dict(zip(key_cols, g.key)), "n": g.n, "n_severe": g.n_severe, "p": g.p, "sigma": g.sigma}
            for g in table.groups
        ]
        return JSONResponse(content={"grouping": grouping, "rows": rows})

    static_dir = config.static_dir
    if static_dir and Path(static_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app
