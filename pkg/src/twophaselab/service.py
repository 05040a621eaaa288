"""HTTP facade over the scenario runners.

POST a configuration document to /classify, /stationary, /evolve, or /sweep
and receive the artifacts as text plus a machine-readable summary.  Errors
map to structured payloads: invalid configuration is 422, an unreachable
profile or a blown-up run is 409 with a `code` the thin client translates
into exit codes.
"""
from __future__ import annotations

from fastapi import FastAPI
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from . import __version__
from .config import parse_config
from .errors import BlowUpError, ConfigError, NoProfileError, StructuralError, TwoPhaseError
from .scenarios import RUNNERS


class ScenarioRequest(BaseModel):
    """A full configuration document, optionally overridden per call."""

    config: dict
    seed: int | None = Field(default=None, ge=0)
    force_regime: str | None = None


class ScenarioResponse(BaseModel):
    scenario: str
    files: dict[str, str]
    summary: dict


class HealthResponse(BaseModel):
    status: str
    version: str


def create_app() -> FastAPI:
    app = FastAPI(title="twophaselab", version=__version__)

    @app.exception_handler(TwoPhaseError)
    async def _domain_error(request, exc: TwoPhaseError):
        if isinstance(exc, ConfigError):
            status, code = 422, "invalid-config"
        elif isinstance(exc, NoProfileError):
            status, code = 409, "no-profile"
        elif isinstance(exc, BlowUpError):
            status, code = 409, "blow-up"
        elif isinstance(exc, StructuralError):
            status, code = 409, "structural"
        else:
            status, code = 400, "domain-error"
        return JSONResponse(status_code=status,
                            content={"code": code, "detail": str(exc)})

    @app.get("/health", response_model=HealthResponse)
    def health():
        return HealthResponse(status="ok", version=__version__)

    def _run(scenario: str, req: ScenarioRequest) -> ScenarioResponse:
        doc = dict(req.config)
        doc["scenario"] = scenario
        if req.seed is not None:
            doc["seed"] = req.seed
        if req.force_regime is not None:
            doc["force_regime"] = req.force_regime
        cfg = parse_config(doc)
        files, summary = RUNNERS[scenario](cfg)
        return ScenarioResponse(scenario=scenario, files=files, summary=summary)

    @app.post("/classify", response_model=ScenarioResponse)
    def classify(req: ScenarioRequest):
        return _run("classify", req)

    @app.post("/stationary", response_model=ScenarioResponse)
    def stationary(req: ScenarioRequest):
        return _run("stationary", req)

    @app.post("/evolve", response_model=ScenarioResponse)
    def evolve(req: ScenarioRequest):
        return _run("evolve", req)

    @app.post("/sweep", response_model=ScenarioResponse)
    def sweep(req: ScenarioRequest):
        return _run("sweep", req)

    return app


app = create_app()
