"""HTTP facade: the same handlers as the CLI, behind a small FastAPI app.

Domain errors map to a stable payload ``{"kind": ..., "error": ...}``:
``input`` (HTTP 400) for malformed requests, ``cap`` (HTTP 422) when a
resource cap would be exceeded, and ``verify`` (HTTP 500) when a
mathematical invariant or verification self-check fails server-side.
Request-shape errors raised by the model layer keep FastAPI's usual 422
validation payload.
"""

from __future__ import annotations

from typing import Optional, Union

from fastapi import FastAPI
from fastapi.responses import JSONResponse
from pydantic import BaseModel, ConfigDict, Field

from . import __version__
from .api import analyze_payload, survey_payload, verify_payload
from .config import (
    AcatlabError,
    CapExceeded,
    InputError,
    RunConfig,
)


class ConfigPatch(BaseModel):
    """Optional per-request overrides of the run configuration."""

    model_config = ConfigDict(extra="forbid")

    order_cap: Optional[int] = Field(default=None, ge=1)
    assoc_exhaustive_cap: Optional[int] = Field(default=None, ge=1)
    assoc_samples: Optional[int] = Field(default=None, ge=1)
    face_cap: Optional[int] = Field(default=None, ge=1)
    homology_rank_cap: Optional[int] = Field(default=None, ge=1)
    verify_face_cap: Optional[int] = Field(default=None, ge=1)
    subgroup_enum_cap: Optional[int] = Field(default=None, ge=1)
    seed: Optional[int] = Field(default=None, ge=0)
    parallel: Optional[int] = Field(default=None, ge=1)

    def apply(self, base: RunConfig) -> RunConfig:
        patch = {k: v for k, v in self.model_dump().items() if v is not None}
        return base.with_overrides(**patch) if patch else base


class AnalyzeRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    group: Union[str, dict]
    certify: bool = False
    config: Optional[ConfigPatch] = None


class SurveyRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    max_order: int = Field(ge=0)
    config: Optional[ConfigPatch] = None


class VerifyRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    suite: str
    config: Optional[ConfigPatch] = None


def _base_config() -> RunConfig:
    return RunConfig.from_environment()


def _request_config(patch: Optional[ConfigPatch]) -> RunConfig:
    base = _base_config()
    return patch.apply(base) if patch is not None else base


app = FastAPI(title="acatlab", version=__version__)


@app.exception_handler(AcatlabError)
async def _domain_error(request, exc: AcatlabError) -> JSONResponse:
    if isinstance(exc, InputError):
        kind, status = "input", 400
    elif isinstance(exc, CapExceeded):
        kind, status = "cap", 422
    else:
        kind, status = "verify", 500
    return JSONResponse(status_code=status,
                        content={"kind": kind, "error": str(exc)})


@app.get("/health")
def health() -> dict:
    return {"schema": 1, "status": "ok", "version": __version__}


@app.post("/analyze")
def analyze(req: AnalyzeRequest) -> dict:
    return analyze_payload(req.group, req.certify, _request_config(req.config))


@app.post("/survey")
def run_survey(req: SurveyRequest) -> dict:
    return survey_payload(req.max_order, _request_config(req.config))


@app.post("/verify")
def run_verify(req: VerifyRequest) -> dict:
    return verify_payload(req.suite, _request_config(req.config))
