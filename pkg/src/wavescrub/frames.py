"""Planar frame model: float64 samples in nominal [0, 1] range, explicit colorspace.

Planes are stored as (height, width) row-major arrays. Samples are kept as
unit-scale reals end to end; quantization to 8-bit happens only inside the
codecs. Intermediate values are allowed to leave [0, 1].
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import InvalidColorspace, RegionOutOfBounds


class Colorspace(str, Enum):
    GRAY = "gray"
    RGB = "rgb"
    YCBCR = "ycbcr"


CHANNEL_COUNT = {Colorspace.GRAY: 1, Colorspace.RGB: 3, Colorspace.YCBCR: 3}

# BT.601 full-range constants.
_KR, _KG, _KB = 0.299, 0.587, 0.114
_CB_SCALE = 0.564
_CR_SCALE = 0.713


@dataclass(frozen=True)
class Frame:
    planes: tuple[np.ndarray, ...]
    colorspace: Colorspace

    def __post_init__(self):
        expected = CHANNEL_COUNT[self.colorspace]
        if len(self.planes) != expected:
            raise InvalidColorspace(
                f"{self.colorspace.value} frame needs {expected} planes, got {len(self.planes)}"
            )
        shape = self.planes[0].shape
        for p in self.planes:
            if p.ndim != 2 or p.shape != shape:
                raise InvalidColorspace("all planes must share one 2-D shape")
            if p.shape[0] < 1 or p.shape[1] < 1:
                raise InvalidColorspace("planes must be at least 1x1")
            if not np.all(np.isfinite(p)):
                raise InvalidColorspace("plane samples must be finite")

    @property
    def width(self) -> int:
        return self.planes[0].shape[1]

    @property
    def height(self) -> int:
        return self.planes[0].shape[0]

    def with_planes(self, planes) -> "Frame":
        return Frame(tuple(np.asarray(p, dtype=np.float64) for p in planes), self.colorspace)


def frame_from_planes(planes, colorspace: Colorspace) -> Frame:
    return Frame(tuple(np.asarray(p, dtype=np.float64) for p in planes), colorspace)


def gray_frame(plane) -> Frame:
    return frame_from_planes([plane], Colorspace.GRAY)


@dataclass(frozen=True)
class Region:
    x: int
    y: int
    w: int
    h: int

    def __post_init__(self):
        if self.w < 1 or self.h < 1:
            raise RegionOutOfBounds(f"region extents must be positive, got {self.w}x{self.h}")

    def require_inside(self, width: int, height: int) -> None:
        if self.x < 0 or self.y < 0 or self.x + self.w > width or self.y + self.h > height:
            raise RegionOutOfBounds(
                f"region ({self.x},{self.y},{self.w},{self.h}) outside {width}x{height} frame"
            )

    def slices(self) -> tuple[slice, slice]:
        return slice(self.y, self.y + self.h), slice(self.x, self.x + self.w)


def full_region(frame: Frame) -> Region:
    return Region(0, 0, frame.width, frame.height)


def crop(frame: Frame, region: Region) -> Frame:
    """Copy a rectangular sub-frame; region must lie fully inside the frame."""
    region.require_inside(frame.width, frame.height)
    ys, xs = region.slices()
    return Frame(tuple(p[ys, xs].copy() for p in frame.planes), frame.colorspace)


def rgb_to_ycbcr(frame: Frame) -> Frame:
    """BT.601 full-range RGB -> YCbCr with chroma centered on 0.5."""
    if frame.colorspace is not Colorspace.RGB:
        raise InvalidColorspace(f"expected rgb frame, got {frame.colorspace.value}")
    r, g, b = frame.planes
    y = _KR * r + _KG * g + _KB * b
    cb = 0.5 + (b - y) * _CB_SCALE
    cr = 0.5 + (r - y) * _CR_SCALE
    return Frame((y, cb, cr), Colorspace.YCBCR)


def ycbcr_to_rgb(frame: Frame) -> Frame:
    """Algebraic inverse of rgb_to_ycbcr, clamped to [0, 1] at the output only."""
    if frame.colorspace is not Colorspace.YCBCR:
        raise InvalidColorspace(f"expected ycbcr frame, got {frame.colorspace.value}")
    y, cb, cr = frame.planes
    r = y + (cr - 0.5) / _CR_SCALE
    b = y + (cb - 0.5) / _CB_SCALE
    g = (y - _KR * r - _KB * b) / _KG
    return Frame(
        tuple(np.clip(p, 0.0, 1.0) for p in (r, g, b)),
        Colorspace.RGB,
    )


def luma(frame: Frame) -> np.ndarray:
    """Luma plane: Y for YCbCr, BT.601 combination for RGB, the plane for gray."""
    if frame.colorspace is Colorspace.GRAY:
        return frame.planes[0]
    if frame.colorspace is Colorspace.YCBCR:
        return frame.planes[0]
    r, g, b = frame.planes
    return _KR * r + _KG * g + _KB * b


def clamp_unit(frame: Frame) -> Frame:
    return Frame(tuple(np.clip(p, 0.0, 1.0) for p in frame.planes), frame.colorspace)
