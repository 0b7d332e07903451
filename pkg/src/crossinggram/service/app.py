"""HTTP surface: one endpoint per command, stateless and idempotent."""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .._version import __version__
from ..empirical import NoExceedances
from ..estimate import MissingSupport
from ..runspec import ConfigError
from . import handlers
from .schemas import (
    EstimateRequest,
    EstimateResponse,
    ExactRequest,
    ExactResponse,
    HealthResponse,
    MapRequest,
    MapResponse,
    SimulateRequest,
    SimulateResponse,
    SweepRequest,
    SweepResponse,
)

app = FastAPI(
    title="crossinggram",
    version=__version__,
    description=(
        "Crossing coefficients for lattice random fields: deterministic "
        "simulation, exact values, rank-based estimation, level sweeps "
        "and window maps."
    ),
)


@app.exception_handler(ConfigError)
async def _config_error(_: Request, exc: ConfigError) -> JSONResponse:
    return JSONResponse(
        status_code=400,
        content={"detail": {"kind": "config", "message": str(exc)}},
    )


@app.exception_handler(MissingSupport)
async def _missing_support(_: Request, exc: MissingSupport) -> JSONResponse:
    return JSONResponse(
        status_code=409,
        content={
            "detail": {
                "kind": "missing_support",
                "message": str(exc),
                "missing": [list(p) for p in exc.missing],
            }
        },
    )


@app.exception_handler(NoExceedances)
async def _no_exceedances(_: Request, exc: NoExceedances) -> JSONResponse:
    return JSONResponse(
        status_code=422,
        content={"detail": {"kind": "no_exceedances", "message": str(exc), "u": exc.u}},
    )


@app.get("/health", response_model=HealthResponse)
def health() -> HealthResponse:
    return handlers.health()


@app.post("/simulate", response_model=SimulateResponse)
def simulate(req: SimulateRequest) -> SimulateResponse:
    return handlers.run_simulate(req)


@app.post("/exact", response_model=ExactResponse)
def exact(req: ExactRequest) -> ExactResponse:
    return handlers.run_exact(req)


@app.post("/estimate", response_model=EstimateResponse)
def estimate(req: EstimateRequest) -> EstimateResponse:
    return handlers.run_estimate(req)


@app.post("/sweep", response_model=SweepResponse)
def sweep(req: SweepRequest) -> SweepResponse:
    return handlers.run_sweep(req)


@app.post("/map", response_model=MapResponse)
def window_map(req: MapRequest) -> MapResponse:
    return handlers.run_map(req)
