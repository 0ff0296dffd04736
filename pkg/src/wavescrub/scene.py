"""Deterministic synthetic near/far test scene.

A mid-gray background with two striped rectangles: a large near figure on the
left and a small far figure on the right. Stripes are 2 px tall with +-0.1
amplitude, so flattening a figure's texture completely costs exactly 20 dB of
PSNR inside its region; the far figure sits on a 4-aligned grid position so
coarse block mosaics preserve its mean contrast (0.3 in luma against the
background) exactly. Everything is gray (R=G=B), and every sample value lies
exactly on the 8-bit grid (k/255), so the scene and its contrast numbers
survive PPM quantization bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SceneTooSmall
from .frames import Colorspace, Frame, Region

BASE_SIZE = 256
BACKGROUND_VALUE = 128 / 255
NEAR_MEAN, NEAR_AMP = 51.5 / 255, 25.5 / 255  # stripe values 26/255 and 77/255
FAR_MEAN, FAR_AMP = 204.5 / 255, 25.5 / 255   # stripe values 179/255 and 230/255
STRIPE_PX = 2

_BASE_NEAR = Region(24, 80, 64, 96)
_BASE_FAR = Region(200, 120, 8, 12)
_BASE_BACKGROUND = Region(112, 16, 64, 64)


@dataclass(frozen=True)
class SceneParams:
    width: int = BASE_SIZE
    height: int = BASE_SIZE

    def __post_init__(self):
        if self.width < 128 or self.height < 128 or self.width % 2 or self.height % 2:
            raise SceneTooSmall(
                f"scene needs even dims of at least 128, got {self.width}x{self.height}"
            )


def _scale(value: int, size: int) -> int:
    # keep geometry on a 4-aligned grid so dyadic block mosaics stay exact
    scaled = int(round(value * size / BASE_SIZE / 4)) * 4
    return max(4, scaled)


def _scale_region(region: Region, width: int, height: int) -> Region:
    return Region(
        _scale(region.x, width),
        _scale(region.y, height),
        _scale(region.w, width),
        _scale(region.h, height),
    )


def _paint_stripes(plane: np.ndarray, region: Region, mean: float, amp: float) -> None:
    ys, xs = region.slices()
    rows = np.arange(region.h)
    stripe = ((rows // STRIPE_PX) % 2) * 2.0 - 1.0  # -1, +1 alternating bands
    plane[ys, xs] = mean + amp * stripe[:, None]


def near_far_scene(params: SceneParams = SceneParams()) -> tuple[Frame, dict[str, Region]]:
    """Build the scene and its named regions (near_figure, far_figure, background)."""
    w, h = params.width, params.height
    regions = {
        "near_figure": _scale_region(_BASE_NEAR, w, h),
        "far_figure": _scale_region(_BASE_FAR, w, h),
        "background": _scale_region(_BASE_BACKGROUND, w, h),
    }
    plane = np.full((h, w), BACKGROUND_VALUE)
    _paint_stripes(plane, regions["near_figure"], NEAR_MEAN, NEAR_AMP)
    _paint_stripes(plane, regions["far_figure"], FAR_MEAN, FAR_AMP)
    frame = Frame((plane.copy(), plane.copy(), plane), Colorspace.RGB)
    return frame, regions


def regions_to_dict(regions: dict[str, Region]) -> dict[str, list[int]]:
    return {name: [r.x, r.y, r.w, r.h] for name, r in regions.items()}


def regions_from_dict(data: dict) -> dict[str, Region]:
    out = {}
    for name, values in data.items():
        x, y, w, h = (int(v) for v in values)
        out[name] = Region(x, y, w, h)
    return out
