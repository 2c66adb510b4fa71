"""FastAPI application exposing the annotation workflow.

Endpoints: GET /status, GET /meta, GET /queue, GET /sample/{id}/image,
GET /sample/{id}/prediction, GET /sample/{id}/uncertainty, POST /labels,
POST /cycle/advance, GET /metrics. Errors carry machine-readable codes in
``detail.code``. When a console build directory is supplied its static
assets are served at the root path.
"""

from __future__ import annotations

import base64
from pathlib import Path

from fastapi import FastAPI, HTTPException, Response
from fastapi.staticfiles import StaticFiles

from ..loop import ExperimentConfig
from .schemas import (
    AdvanceResponse,
    LabelAccepted,
    LabelSubmission,
    MetaResponse,
    MetricsResponse,
    QueueResponse,
    StatusResponse,
)
from .state import AnnotationService, ServiceError


def create_app(service: AnnotationService, console_dir=None) -> FastAPI:
    app = FastAPI(title="segal annotation service", version="0.1.0")
    app.state.service = service

    def _fail(exc: ServiceError):
        raise HTTPException(
            status_code=exc.status_code, detail={"code": exc.code, "message": exc.message}
        )

    @app.get("/status", response_model=StatusResponse)
    def status():
        return service.status()

    @app.get("/meta", response_model=MetaResponse)
    def meta():
        return service.meta()

    @app.get("/queue", response_model=QueueResponse)
    def queue():
        return {"items": service.queue()}

    @app.get("/sample/{sample_id}/image")
    def sample_image(sample_id: str):
        try:
            return Response(service.image_png(sample_id), media_type="image/png")
        except ServiceError as exc:
            _fail(exc)

    @app.get("/sample/{sample_id}/prediction")
    def sample_prediction(sample_id: str):
        try:
            return Response(service.prediction_png(sample_id), media_type="image/png")
        except ServiceError as exc:
            _fail(exc)

    @app.get("/sample/{sample_id}/uncertainty")
    def sample_uncertainty(sample_id: str):
        try:
            return Response(service.uncertainty_png(sample_id), media_type="image/png")
        except ServiceError as exc:
            _fail(exc)

    @app.post("/labels", response_model=LabelAccepted)
    def submit_label(submission: LabelSubmission):
        try:
            png_bytes = base64.b64decode(submission.mask_png_base64, validate=True)
        except Exception:
            raise HTTPException(
                status_code=422, detail={"code": "malformed_mask", "message": "invalid base64 payload"}
            )
        try:
            return service.submit_label(submission.id, png_bytes)
        except ServiceError as exc:
            _fail(exc)

    @app.post("/cycle/advance", response_model=AdvanceResponse)
    def advance():
        try:
            return service.advance()
        except ServiceError as exc:
            _fail(exc)

    @app.get("/metrics", response_model=MetricsResponse)
    def metrics():
        return {"records": service.metrics()}

    if console_dir is not None and Path(console_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(console_dir), html=True), name="console")
    return app


def build_app(dataset_dir, cfg: ExperimentConfig, state_dir, console_dir=None) -> FastAPI:
    return create_app(AnnotationService(dataset_dir, cfg, state_dir), console_dir=console_dir)
