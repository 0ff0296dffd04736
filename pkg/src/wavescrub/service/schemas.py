"""Pydantic request/response models for the HTTP service."""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

MethodName = Literal["wtaa", "gaussian", "downsample", "superpixel"]


class HealthResponse(BaseModel):
    status: str
    version: str


class AnonymizeQuery(BaseModel):
    model_config = ConfigDict(extra="forbid")

    method: MethodName
    format: Literal["auto", "ppm", "y4m"] = "auto"
    basis: Optional[Literal["haar", "db4", "cdf97"]] = None
    levels: Optional[int] = Field(default=None, ge=1)
    destroy_finest: Optional[int] = Field(default=None, ge=0)
    chroma_destroy: Optional[int] = Field(default=None, ge=0)
    sigma: Optional[float] = Field(default=None, gt=0)
    factor: Optional[int] = Field(default=None, ge=2)
    segments: Optional[int] = Field(default=None, ge=2)
    compactness: Optional[float] = Field(default=None, gt=0)
    iterations: Optional[int] = Field(default=None, ge=1)

    def method_params(self) -> dict:
        fields = {
            "wtaa": ("basis", "levels", "destroy_finest", "chroma_destroy"),
            "gaussian": ("sigma",),
            "downsample": ("factor",),
            "superpixel": ("segments", "compactness", "iterations"),
        }[self.method]
        return {k: getattr(self, k) for k in fields if getattr(self, k) is not None}


class SceneRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    width: int = Field(default=256, ge=128)
    height: int = Field(default=256, ge=128)


class SynthResponse(BaseModel):
    width: int
    height: int
    ppm_b64: str
    regions: dict[str, list[int]]


class MethodSweepRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    method: MethodName
    params: dict[str, float | int | str] = Field(default_factory=dict)
    sweep: dict[str, list[float | int]] = Field(default_factory=dict)


class CompareRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    methods: list[MethodSweepRequest]
    scene: Optional[SceneRequest] = None
    input_b64: Optional[str] = None
    format: Literal["auto", "ppm", "y4m"] = "auto"
    regions: Optional[dict[str, list[int]]] = None
    target_psnr: float = 20.0
    tolerance: float = 1.0
    match_region: str = "near_figure"


class MetricValues(BaseModel):
    psnr_db: float
    ssim: float
    edge_retention: float
    contrast_retention: Optional[float] = None


class MetricsBlock(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    overall: MetricValues = Field(alias="global")
    regions: dict[str, MetricValues]


class ComparePoint(BaseModel):
    params: dict[str, float | int | str]
    metrics: MetricsBlock


class MatchedPoint(BaseModel):
    params: dict[str, float | int | str]
    metrics: MetricsBlock
    match_psnr_db: float
    within_tolerance: bool


class MethodReport(BaseModel):
    method: MethodName
    points: list[ComparePoint]
    matched: MatchedPoint


class CompareTarget(BaseModel):
    region: str
    psnr_db: float
    tolerance_db: float


class CompareResponse(BaseModel):
    target: CompareTarget
    frames: int
    methods: list[MethodReport]


class BenchRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    sizes: list[int] = Field(default_factory=lambda: [256])
    methods: list[MethodSweepRequest] = Field(default_factory=list)
    runs: int = Field(default=5, ge=1)


class BenchTiming(BaseModel):
    median: float
    p95: float


class BenchResult(BaseModel):
    method: MethodName
    params: dict[str, float | int | str]
    width: int
    height: int
    per_frame_ms: BenchTiming
    samples_ms: list[float]


class BenchResponse(BaseModel):
    runs: int
    results: list[BenchResult]


class ErrorResponse(BaseModel):
    error: str
    detail: str
