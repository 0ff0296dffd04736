"""Anonymization by wavelet coefficient destruction.

Each frame channel is decomposed into a multi-level pyramid, every detail
coefficient is multiplied by a per-(level, band) gain, and the pyramid is
inverted. Gain 0 destroys a band, 1 keeps it, intermediate values attenuate.
Destroying the finest levels removes identifying texture while the coarse
shape and color held by deeper levels and the approximation band survive.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from typing import Mapping, Optional

import numpy as np

from .dwt import BandKind, DetailTriple, Pyramid, Subband, WaveletBasis, decompose_plane, reconstruct
from .errors import InvalidDepth, InvalidGain, PolicyLevelMismatch
from .frames import Colorspace, Frame, rgb_to_ycbcr, ycbcr_to_rgb

DETAIL_BANDS = (BandKind.LH, BandKind.HL, BandKind.HH)


@dataclass(frozen=True)
class DestructionPolicy:
    """Per-(level, band) attenuation table plus an approximation-band gain."""

    levels: int
    gains: Mapping[tuple[int, BandKind], float]
    approx_gain: float = 1.0

    def __post_init__(self):
        expected = {(lvl, band) for lvl in range(1, self.levels + 1) for band in DETAIL_BANDS}
        if set(self.gains.keys()) != expected:
            raise InvalidGain(
                f"policy must define exactly one gain per (level, band) for levels 1..{self.levels}"
            )
        for key, gain in self.gains.items():
            if not 0.0 <= gain <= 1.0:
                raise InvalidGain(f"gain for {key} is {gain}, outside [0, 1]")
        if not 0.0 <= self.approx_gain <= 1.0:
            raise InvalidGain(f"approx gain {self.approx_gain} outside [0, 1]")

    def gain(self, level: int, band: BandKind) -> float:
        return self.gains[(level, band)]


def default_policy(levels: int, destroy_finest: int) -> DestructionPolicy:
    """Destroy all detail bands at levels 1..destroy_finest, keep everything else."""
    if not 0 <= destroy_finest <= levels:
        raise InvalidDepth(f"destroy_finest {destroy_finest} outside 0..{levels}")
    gains = {
        (lvl, band): 0.0 if lvl <= destroy_finest else 1.0
        for lvl in range(1, levels + 1)
        for band in DETAIL_BANDS
    }
    return DestructionPolicy(levels=levels, gains=gains, approx_gain=1.0)


def policy_from_dict(data: dict) -> DestructionPolicy:
    """Build a policy from its JSON form: an explicit per-(level, band) table.

    {"levels": 2, "gains": {"1": {"LH": 0, "HL": 0, "HH": 0},
                            "2": {"LH": 1, "HL": 1, "HH": 0.5}},
     "approx_gain": 1.0}
    """
    try:
        levels = int(data["levels"])
        gains = {}
        for level_key, bands in data["gains"].items():
            for band_key, gain in bands.items():
                gains[(int(level_key), BandKind(band_key.upper()))] = float(gain)
        approx_gain = float(data.get("approx_gain", 1.0))
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise InvalidGain(f"malformed policy table: {exc}") from exc
    return DestructionPolicy(levels=levels, gains=gains, approx_gain=approx_gain)


class ColorMode(str, Enum):
    PER_CHANNEL = "per-channel"
    LUMA_CHROMA = "luma-chroma"


@dataclass(frozen=True)
class WtaaConfig:
    basis: WaveletBasis
    policy: DestructionPolicy
    chroma_policy: Optional[DestructionPolicy] = None
    color_mode: ColorMode = ColorMode.LUMA_CHROMA


def make_config(
    basis: WaveletBasis,
    levels: int,
    destroy_finest: int,
    chroma_destroy: Optional[int] = None,
    color_mode: ColorMode = ColorMode.LUMA_CHROMA,
) -> WtaaConfig:
    """Config helper: chroma carries less identifying detail, so by default it
    gets one fewer destroyed level than luma."""
    policy = default_policy(levels, destroy_finest)
    if chroma_destroy is None:
        chroma_destroy = max(0, destroy_finest - 1)
    chroma_policy = default_policy(levels, chroma_destroy)
    return WtaaConfig(basis=basis, policy=policy, chroma_policy=chroma_policy, color_mode=color_mode)


def apply_policy(pyramid: Pyramid, policy: DestructionPolicy) -> Pyramid:
    """Scale every band by its gain; structure, dims and pad log are unchanged."""
    if policy.levels != pyramid.levels:
        raise PolicyLevelMismatch(
            f"policy has {policy.levels} levels, pyramid has {pyramid.levels}"
        )
    approx = Subband(
        pyramid.approx.kind,
        pyramid.approx.level,
        pyramid.approx.plane * policy.approx_gain,
    )
    details = []
    for triple in pyramid.details:
        scaled = {}
        for band in triple.bands():
            scaled[band.kind] = Subband(
                band.kind, band.level, band.plane * policy.gain(band.level, band.kind)
            )
        details.append(
            DetailTriple(lh=scaled[BandKind.LH], hl=scaled[BandKind.HL], hh=scaled[BandKind.HH])
        )
    return replace(pyramid, approx=approx, details=details)


def _anonymize_plane(plane: np.ndarray, basis: WaveletBasis, policy: DestructionPolicy) -> np.ndarray:
    pyramid = decompose_plane(plane, basis, policy.levels)
    return reconstruct(apply_policy(pyramid, policy))


def anonymize_wtaa(frame: Frame, cfg: WtaaConfig) -> Frame:
    """Decompose, attenuate, reconstruct each channel; clamp to [0, 1] at the end.

    In luma-chroma mode RGB input is converted to YCbCr, the chroma policy (or
    the main policy when absent) is applied to Cb/Cr, and the result converted
    back. Gray frames always use the main policy.
    """
    chroma_policy = cfg.chroma_policy or cfg.policy
    if cfg.color_mode is ColorMode.LUMA_CHROMA and frame.colorspace is not Colorspace.GRAY:
        work = rgb_to_ycbcr(frame) if frame.colorspace is Colorspace.RGB else frame
        planes = [
            _anonymize_plane(work.planes[0], cfg.basis, cfg.policy),
            _anonymize_plane(work.planes[1], cfg.basis, chroma_policy),
            _anonymize_plane(work.planes[2], cfg.basis, chroma_policy),
        ]
        out = Frame(tuple(planes), Colorspace.YCBCR)
        if frame.colorspace is Colorspace.RGB:
            return ycbcr_to_rgb(out)  # clamps on conversion
        return Frame(tuple(np.clip(p, 0.0, 1.0) for p in planes), Colorspace.YCBCR)
    planes = [_anonymize_plane(p, cfg.basis, cfg.policy) for p in frame.planes]
    return Frame(tuple(np.clip(p, 0.0, 1.0) for p in planes), frame.colorspace)
