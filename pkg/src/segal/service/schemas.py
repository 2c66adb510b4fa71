"""Pydantic request/response models for the annotation service API."""

from __future__ import annotations

from pydantic import BaseModel, Field


class StatusResponse(BaseModel):
    cycle: int
    labeled: int
    unlabeled: int
    pending: int
    consumed: int
    total_budget: int
    strategy: str
    busy: bool
    done: bool
    error: str | None = None


class MetaResponse(BaseModel):
    num_classes: int
    class_names: list[str]
    color_map: list[list[int]]
    height: int
    width: int


class QueueItem(BaseModel):
    sample_id: str
    status: str = "pending"
    score: float | None = None


class QueueResponse(BaseModel):
    items: list[QueueItem]


class LabelSubmission(BaseModel):
    id: str
    mask_png_base64: str = Field(description="8-bit index-mask PNG, base64 encoded")


class LabelAccepted(BaseModel):
    id: str
    labeled: int
    pending: int
    cycle: int


class AdvanceResponse(BaseModel):
    advancing: bool
    reason: str | None = None


class MetricsResponse(BaseModel):
    records: list[dict]


class ErrorBody(BaseModel):
    code: str
    message: str
