"""Fidelity metrics quantifying anonymity versus usability, globally and per region.

Anonymity is proxied by inverse fidelity inside an object region (low
PSNR/SSIM/edge retention there); usability by how much structure survives
elsewhere. No recognition model is involved; the proxy is explicit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .baselines import gaussian_kernel
from .errors import DegenerateContrast, DimMismatch, FrameTooSmall, RegionOutOfBounds
from .frames import Frame, Region, crop, luma

PSNR_CAP = 99.0
SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
SSIM_C1 = 0.01**2
SSIM_C2 = 0.03**2


def _require_same_dims(a: Frame, b: Frame) -> None:
    if a.width != b.width or a.height != b.height or len(a.planes) != len(b.planes):
        raise DimMismatch(
            f"frames differ: {a.width}x{a.height}x{len(a.planes)} vs "
            f"{b.width}x{b.height}x{len(b.planes)}"
        )


def psnr(a: Frame, b: Frame) -> float:
    """10 log10(1/MSE) over all channels on unit range, capped at 99 dB."""
    _require_same_dims(a, b)
    err = 0.0
    count = 0
    for pa, pb in zip(a.planes, b.planes):
        err += float(np.sum((pa - pb) ** 2))
        count += pa.size
    mse = err / count
    if mse == 0.0:
        return PSNR_CAP
    return min(PSNR_CAP, 10.0 * math.log10(1.0 / mse))


def _ssim_window_kernel() -> np.ndarray:
    k = gaussian_kernel(SSIM_SIGMA)
    r = (len(k) - 1) // 2
    half = SSIM_WINDOW // 2
    k = k[r - half : r + half + 1]
    return k / k.sum()


_SSIM_K = _ssim_window_kernel()


def _filter_valid(p: np.ndarray, k: np.ndarray) -> np.ndarray:
    rows = np.lib.stride_tricks.sliding_window_view(p, len(k), axis=1) @ k
    return np.lib.stride_tricks.sliding_window_view(rows, len(k), axis=0) @ k


def _ssim_plane(x: np.ndarray, y: np.ndarray) -> float:
    k = _SSIM_K
    mu_x = _filter_valid(x, k)
    mu_y = _filter_valid(y, k)
    xx = _filter_valid(x * x, k) - mu_x**2
    yy = _filter_valid(y * y, k) - mu_y**2
    xy = _filter_valid(x * y, k) - mu_x * mu_y
    num = (2 * mu_x * mu_y + SSIM_C1) * (2 * xy + SSIM_C2)
    den = (mu_x**2 + mu_y**2 + SSIM_C1) * (xx + yy + SSIM_C2)
    return float(np.mean(num / den))


def ssim(a: Frame, b: Frame) -> float:
    """Mean local SSIM (11x11 Gaussian window, sigma 1.5), averaged over channels."""
    _require_same_dims(a, b)
    if min(a.width, a.height) < SSIM_WINDOW:
        raise FrameTooSmall(
            f"ssim needs both dims >= {SSIM_WINDOW}, got {a.width}x{a.height}"
        )
    return float(np.mean([_ssim_plane(pa, pb) for pa, pb in zip(a.planes, b.planes)]))


def sobel_magnitude(plane: np.ndarray) -> np.ndarray:
    """Gradient magnitude with symmetric padding so the map keeps the plane's shape."""
    p = np.pad(plane, 1, mode="symmetric")
    gx = (
        (p[:-2, 2:] + 2 * p[1:-1, 2:] + p[2:, 2:])
        - (p[:-2, :-2] + 2 * p[1:-1, :-2] + p[2:, :-2])
    )
    gy = (
        (p[2:, :-2] + 2 * p[2:, 1:-1] + p[2:, 2:])
        - (p[:-2, :-2] + 2 * p[:-2, 1:-1] + p[:-2, 2:])
    )
    return np.hypot(gx, gy)


def edge_retention(orig: Frame, anon: Frame, region: Optional[Region] = None) -> float:
    """Pearson correlation of Sobel gradient magnitudes over the luma planes,
    clamped to [0, 1]. Zero-variance original gradient counts as fully retained
    only when the anonymized gradient is also flat."""
    _require_same_dims(orig, anon)
    g_orig = sobel_magnitude(luma(orig))
    g_anon = sobel_magnitude(luma(anon))
    if region is not None:
        region.require_inside(orig.width, orig.height)
        ys, xs = region.slices()
        g_orig = g_orig[ys, xs]
        g_anon = g_anon[ys, xs]
    vo = float(np.var(g_orig))
    va = float(np.var(g_anon))
    if vo < 1e-24:
        return 1.0 if va < 1e-24 else 0.0
    if va < 1e-24:
        return 0.0
    corr = float(np.mean((g_orig - g_orig.mean()) * (g_anon - g_anon.mean())) / math.sqrt(vo * va))
    return min(1.0, max(0.0, corr))


def _region_mean(frame: Frame, region: Region) -> float:
    ys, xs = region.slices()
    return float(np.mean([p[ys, xs].mean() for p in frame.planes]))


def contrast_retention(orig: Frame, anon: Frame, object_r: Region, bg_r: Region) -> float:
    """Ratio of object/background mean contrast after anonymization to before."""
    _require_same_dims(orig, anon)
    object_r.require_inside(orig.width, orig.height)
    bg_r.require_inside(orig.width, orig.height)
    if not (
        object_r.x + object_r.w <= bg_r.x
        or bg_r.x + bg_r.w <= object_r.x
        or object_r.y + object_r.h <= bg_r.y
        or bg_r.y + bg_r.h <= object_r.y
    ):
        raise RegionOutOfBounds("object and background regions overlap")
    before = abs(_region_mean(orig, object_r) - _region_mean(orig, bg_r))
    if before < 1e-6:
        raise DegenerateContrast(f"original contrast {before} is below 1e-6")
    after = abs(_region_mean(anon, object_r) - _region_mean(anon, bg_r))
    return after / before


@dataclass
class RegionMetrics:
    psnr_db: float
    ssim: float
    edge_retention: float
    contrast_retention: Optional[float] = None


@dataclass
class MetricsReport:
    psnr_db: float
    ssim: float
    edge_retention: float
    per_region: dict[str, RegionMetrics] = field(default_factory=dict)


def _grow_region_for_ssim(region: Region, width: int, height: int) -> Region:
    # SSIM needs SSIM_WINDOW support per axis; widen small regions symmetrically
    def grow(start: int, extent: int, limit: int) -> tuple[int, int]:
        if extent >= SSIM_WINDOW:
            return start, extent
        need = SSIM_WINDOW - extent
        start = max(0, start - need // 2)
        extent = min(limit - start, SSIM_WINDOW)
        start = min(start, limit - extent)
        return start, extent

    x, w = grow(region.x, region.w, width)
    y, h = grow(region.y, region.h, height)
    return Region(x, y, w, h)


def compute_report(
    orig: Frame,
    anon: Frame,
    regions: Optional[dict[str, Region]] = None,
    background: str = "background",
) -> MetricsReport:
    """Global metrics plus one block per named region.

    Per-region contrast_retention compares the region against the region named
    by `background` and is omitted for the background itself (and when no
    background region is given or the original contrast is degenerate).
    """
    _require_same_dims(orig, anon)
    report = MetricsReport(
        psnr_db=psnr(orig, anon),
        ssim=ssim(orig, anon),
        edge_retention=edge_retention(orig, anon),
    )
    if not regions:
        return report
    bg_region = regions.get(background)
    for name, region in regions.items():
        region.require_inside(orig.width, orig.height)
        ssim_region = _grow_region_for_ssim(region, orig.width, orig.height)
        entry = RegionMetrics(
            psnr_db=psnr(crop(orig, region), crop(anon, region)),
            ssim=ssim(crop(orig, ssim_region), crop(anon, ssim_region)),
            edge_retention=edge_retention(orig, anon, region),
        )
        if bg_region is not None and name != background:
            try:
                entry.contrast_retention = contrast_retention(orig, anon, region, bg_region)
            except DegenerateContrast:
                entry.contrast_retention = None
        report.per_region[name] = entry
    return report


def _round6(value: Optional[float]) -> Optional[float]:
    if value is None:
        return None
    return round(float(value), 6)


def report_to_dict(report: MetricsReport) -> dict:
    """JSON-ready dict with fixed 6-decimal rounding for regression diffs."""
    out = {
        "global": {
            "psnr_db": _round6(report.psnr_db),
            "ssim": _round6(report.ssim),
            "edge_retention": _round6(report.edge_retention),
        },
        "regions": {},
    }
    for name, entry in report.per_region.items():
        block = {
            "psnr_db": _round6(entry.psnr_db),
            "ssim": _round6(entry.ssim),
            "edge_retention": _round6(entry.edge_retention),
        }
        if entry.contrast_retention is not None:
            block["contrast_retention"] = _round6(entry.contrast_retention)
        out["regions"][name] = block
    return out
