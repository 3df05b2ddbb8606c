"""Request/response models for the slice-serving API."""

from __future__ import annotations

from pydantic import BaseModel, Field


class BoundsModel(BaseModel):
    lower: list[float]
    upper: list[float]


class MetaResponse(BaseModel):
    M: int
    N: int
    K: int
    labels: list[str]
    bounds: BoundsModel
    eta: list[float]
    has_table_source: bool
    grid_scheme: str
    index_base: int = 0


class MarginalStat(BaseModel):
    length_normalized: float
    length_raw: float
    point: list[float]


class MarginalResponse(BaseModel):
    weights: list[float]
    direction_raw: list[float]
    stats: dict[str, MarginalStat]
    exact: bool
    angular_error_rad: float


class SlicePolyline(BaseModel):
    lengths: list[float]
    points_normalized: list[list[float]]
    points_raw: list[list[float]]
    fixed_raw: list[list[float]]


class SliceResponse(BaseModel):
    i: int
    j: int
    v: list[float]
    scale: float
    angles: list[float]
    polylines: dict[str, SlicePolyline]
    exact: bool
    max_angular_error_rad: float


class DominationResponse(BaseModel):
    y: list[float]
    probability: float
    exact: bool


class DecideRequest(BaseModel):
    target: list[float]
    scoring: str = "squared"
    alpha: float | None = Field(default=None, description="pinball level when scoring=pinball")


class DecideResponse(BaseModel):
    input_id: str | int
    loss: float
    losses: dict[str, float]
    samples: list[list[float]]
