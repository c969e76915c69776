"""HTTP service exposing the run modes.

Each endpoint accepts a JSON body mirroring the run configuration fields
for that mode and returns {metadata, columns, rows}, identical in
content to the CLI's JSON output.  The CLI `serve` subcommand mounts
this app; all heavy lifting stays in the harness.
"""

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import __version__
from .harness import RunConfig, run_evolve, run_spectrum, run_sweep, run_verify


class ModelFields(BaseModel):
    """Couplings shared by every request; defaults match the CLI."""

    dimension: int = Field(default=1, ge=1, le=3)
    m: float = 3.2
    A: float = 0.0
    B: float = 1.0
    alpha: float = 1.2
    gamma: float = 0.0
    scale: float = Field(default=1.0, gt=0.0)


class SpectrumRequest(ModelFields):
    n_range: str = "0:10"
    j: str = "1/2"


class EvolveRequest(ModelFields):
    n: int = Field(default=0, ge=0)
    theta: float = 0.7853981633974483
    t_min: float = 0.0
    t_max: float = 30.0
    t_steps: int = Field(default=121, ge=1)


class SweepRequest(EvolveRequest):
    gamma_min: float = 0.0
    gamma_max: float = 6.4
    gamma_steps: int = Field(default=65, ge=1)
    workers: int = Field(default=1, ge=1)


class VerifyRequest(ModelFields):
    n: int = Field(default=0, ge=0)
    theta: float = 0.7853981633974483
    seed: int = 0
    n_max_truncation: int = Field(default=40, ge=4)


class RunResponse(BaseModel):
    metadata: dict
    columns: "list[str]"
    rows: "list[dict]"


def _config(mode: str, payload: BaseModel) -> RunConfig:
    config = RunConfig(mode=mode, **payload.model_dump())
    try:
        config.validate()
    except ValueError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from None
    return config


def _run(runner, config: RunConfig) -> RunResponse:
    try:
        table = runner(config)
    except (ValueError, ArithmeticError) as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from None
    return RunResponse(**table)


def create_app() -> FastAPI:
    app = FastAPI(
        title="diracfield",
        version=__version__,
        description="Sector spectra and entanglement dynamics of a "
                    "confined fermion coupled to a two-component field.")

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok", "version": __version__}

    @app.post("/spectrum", response_model=RunResponse)
    def spectrum(request: SpectrumRequest) -> RunResponse:
        return _run(run_spectrum, _config("spectrum", request))

    @app.post("/evolve", response_model=RunResponse)
    def evolve(request: EvolveRequest) -> RunResponse:
        return _run(run_evolve, _config("evolve", request))

    @app.post("/sweep", response_model=RunResponse)
    def sweep(request: SweepRequest) -> RunResponse:
        def runner(config):
            result = run_sweep(config)
            return {"metadata": result.metadata, "columns": result.columns,
                    "rows": result.rows()}
        return _run(runner, _config("sweep", request))

    @app.post("/verify", response_model=RunResponse)
    def verify(request: VerifyRequest) -> RunResponse:
        return _run(run_verify, _config("verify", request))

    return app


app = create_app()
