"""HTTP service wrapping the core package.

Frame payloads travel as raw PPM/Y4M bytes (anonymize) or base64 (compare
input, synth output); everything else is JSON. Errors surface as structured
responses: 400 for undecodable input, 422 for bad parameters.
"""

from __future__ import annotations

import base64
import binascii
from typing import Annotated

from fastapi import FastAPI, Query, Request, Response
from fastapi.responses import JSONResponse

from .. import compare as compare_mod
from .. import video_io
from ..errors import ConfigError, VideoIoError, WavescrubError
from ..frames import Frame
from ..scene import SceneParams, near_far_scene, regions_from_dict, regions_to_dict
from . import schemas

__version__ = "0.1.0"

app = FastAPI(
    title="wavescrub",
    version=__version__,
    description="Video anonymization service: wavelet coefficient destruction "
    "plus Gaussian blur, downsampling and superpixel baselines.",
)


@app.exception_handler(VideoIoError)
async def _video_io_error(request: Request, exc: VideoIoError) -> JSONResponse:
    return JSONResponse(
        status_code=400,
        content=schemas.ErrorResponse(error=type(exc).__name__, detail=str(exc)).model_dump(),
    )


@app.exception_handler(WavescrubError)
async def _wavescrub_error(request: Request, exc: WavescrubError) -> JSONResponse:
    return JSONResponse(
        status_code=422,
        content=schemas.ErrorResponse(error=type(exc).__name__, detail=str(exc)).model_dump(),
    )


@app.get("/healthz", response_model=schemas.HealthResponse)
def healthz() -> schemas.HealthResponse:
    return schemas.HealthResponse(status="ok", version=__version__)


def _decode_frames(data: bytes, fmt: str) -> tuple[list[Frame], object]:
    if fmt == "y4m" or (fmt == "auto" and data[:9] == b"YUV4MPEG2"):
        header, frames = video_io.read_y4m_bytes(data)
        return frames, header
    frames = []
    offset = 0
    while offset < len(data):
        frame, offset = video_io.read_ppm_at(data, offset)
        frames.append(frame)
    if not frames:
        raise VideoIoError("empty frame payload")
    return frames, None


@app.post("/v1/anonymize")
async def anonymize(
    request: Request, query: Annotated[schemas.AnonymizeQuery, Query()]
) -> Response:
    data = await request.body()
    frames, header = _decode_frames(data, query.format)
    params = query.method_params()
    compare_mod.validate_method_params(query.method, params)
    processed = [compare_mod.apply_method(f, query.method, params) for f in frames]
    if header is not None:
        payload = video_io.write_y4m_bytes(header, processed)
        media = "video/x-yuv4mpeg2"
    else:
        payload = b"".join(video_io.write_ppm(f) for f in processed)
        media = "image/x-portable-pixmap"
    return Response(content=payload, media_type=media, headers={"x-frames": str(len(processed))})


@app.post("/v1/synth", response_model=schemas.SynthResponse)
def synth(params: schemas.SceneRequest) -> schemas.SynthResponse:
    frame, regions = near_far_scene(SceneParams(width=params.width, height=params.height))
    return schemas.SynthResponse(
        width=frame.width,
        height=frame.height,
        ppm_b64=base64.b64encode(video_io.write_ppm(frame)).decode("ascii"),
        regions=regions_to_dict(regions),
    )


@app.post("/v1/compare", response_model=schemas.CompareResponse)
def compare(request: schemas.CompareRequest) -> schemas.CompareResponse:
    if request.input_b64 is not None:
        try:
            data = base64.b64decode(request.input_b64, validate=True)
        except (binascii.Error, ValueError) as exc:
            raise VideoIoError(f"input_b64 is not valid base64: {exc}") from exc
        frames, _ = _decode_frames(data, request.format)
        if request.regions is None:
            raise ConfigError("compare on uploaded input needs a regions table")
        regions = regions_from_dict(request.regions)
    else:
        scene_params = request.scene or schemas.SceneRequest()
        frame, regions = near_far_scene(
            SceneParams(width=scene_params.width, height=scene_params.height)
        )
        frames = [frame]
        if request.regions is not None:
            regions = regions_from_dict(request.regions)
    specs = [
        compare_mod.MethodSpec(
            method=m.method,
            params=dict(m.params),
            sweep={k: list(v) for k, v in m.sweep.items()},
        )
        for m in request.methods
    ]
    report = compare_mod.run_compare(
        frames,
        specs,
        regions,
        target_psnr=request.target_psnr,
        tolerance=request.tolerance,
        match_region=request.match_region,
    )
    return schemas.CompareResponse.model_validate(report)


@app.post("/v1/bench", response_model=schemas.BenchResponse)
def bench(request: schemas.BenchRequest) -> schemas.BenchResponse:
    specs = [(m.method, dict(m.params)) for m in request.methods]
    if not specs:
        specs = [("wtaa", {"basis": "haar", "levels": 4, "destroy_finest": 2})]
    report = compare_mod.run_bench(request.sizes, specs, runs=request.runs)
    return schemas.BenchResponse.model_validate(report)
