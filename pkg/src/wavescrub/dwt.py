"""Separable 2-D discrete wavelet transform with dyadic multi-level pyramids.

Three bases are provided:

* Haar and Daubechies-4: orthonormal filter banks, run as periodized
  convolutions so that the critically sampled transform is exactly orthogonal
  at every even length (the circulant matrix built from the taps is unitary
  because the polyphase matrix is paraunitary). This is what makes energy
  conservation and transpose-inverse reconstruction hold to rounding error.
* CDF 9/7: the standard biorthogonal imaging wavelet, implemented with the
  lifting scheme and whole-sample symmetric boundary handling, which is
  exactly invertible in floating point regardless of boundary treatment.

Odd-length axes are handled by replicating the last row/column before each
level; the padding is logged in the pyramid and cropped again on inversion.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import (
    BandLengthMismatch,
    CorruptPyramid,
    EmptyPlane,
    OddLengthSignal,
    SignalTooShort,
    TooManyLevels,
)
from .frames import Frame

SQRT2 = math.sqrt(2.0)
_SQRT3 = math.sqrt(3.0)

# CDF 9/7 lifting constants (analysis direction).
CDF97_ALPHA = -1.586134342
CDF97_BETA = -0.052980118
CDF97_GAMMA = 0.882911076
CDF97_DELTA = 0.443506852
CDF97_ZETA = 1.149604398


class BasisId(str, Enum):
    HAAR = "haar"
    DB4 = "db4"
    CDF97 = "cdf97"


@dataclass(frozen=True)
class WaveletBasis:
    """Analysis/synthesis filters, or lifting constants for cdf97.

    For the orthonormal bases the synthesis filters are the time-reversed
    analysis filters; reconstruction uses the transpose of the (orthogonal)
    analysis map directly, so only the analysis taps are stored.
    """

    id: BasisId
    analysis_lowpass: tuple[float, ...] = ()
    analysis_highpass: tuple[float, ...] = ()
    lifting: tuple[float, ...] = ()  # (alpha, beta, gamma, delta, zeta) for cdf97

    @property
    def uses_lifting(self) -> bool:
        return self.id is BasisId.CDF97

    @property
    def synthesis_lowpass(self) -> tuple[float, ...]:
        return tuple(reversed(self.analysis_lowpass))

    @property
    def synthesis_highpass(self) -> tuple[float, ...]:
        return tuple(reversed(self.analysis_highpass))


def _qmf(lowpass: np.ndarray) -> np.ndarray:
    # g[k] = (-1)^k h[L-1-k]
    signs = np.array([(-1.0) ** k for k in range(len(lowpass))])
    return signs * lowpass[::-1]


_HAAR_LO = np.array([1.0, 1.0]) / SQRT2
_DB4_LO = np.array([1.0 + _SQRT3, 3.0 + _SQRT3, 3.0 - _SQRT3, 1.0 - _SQRT3]) / (4.0 * SQRT2)

_BASES = {
    BasisId.HAAR: WaveletBasis(
        BasisId.HAAR,
        analysis_lowpass=tuple(_HAAR_LO),
        analysis_highpass=tuple(_qmf(_HAAR_LO)),
    ),
    BasisId.DB4: WaveletBasis(
        BasisId.DB4,
        analysis_lowpass=tuple(_DB4_LO),
        analysis_highpass=tuple(_qmf(_DB4_LO)),
    ),
    BasisId.CDF97: WaveletBasis(
        BasisId.CDF97,
        lifting=(CDF97_ALPHA, CDF97_BETA, CDF97_GAMMA, CDF97_DELTA, CDF97_ZETA),
    ),
}


def get_basis(name: str | BasisId) -> WaveletBasis:
    return _BASES[BasisId(name)]


class BandKind(str, Enum):
    LL = "LL"
    LH = "LH"
    HL = "HL"
    HH = "HH"


@dataclass(frozen=True)
class Subband:
    kind: BandKind
    level: int
    plane: np.ndarray


@dataclass(frozen=True)
class DetailTriple:
    lh: Subband
    hl: Subband
    hh: Subband

    def bands(self) -> tuple[Subband, Subband, Subband]:
        return (self.lh, self.hl, self.hh)


@dataclass
class Pyramid:
    basis: WaveletBasis
    levels: int
    approx: Subband                 # LL at the deepest level
    details: list[DetailTriple]     # index 0 = level 1 (finest)
    original_size: tuple[int, int]  # (width, height)
    pad_log: list[tuple[int, int]] = field(default_factory=list)  # (right, bottom) per level


# --- 1-D passes along the last axis -------------------------------------------------


def _forward_filter_axis(x: np.ndarray, basis: WaveletBasis) -> tuple[np.ndarray, np.ndarray]:
    """Periodized analysis convolution + decimation along the last axis (even length)."""
    lo = np.asarray(basis.analysis_lowpass)
    hi = np.asarray(basis.analysis_highpass)
    n = x.shape[-1]
    idx = (2 * np.arange(n // 2)[:, None] + np.arange(len(lo))[None, :]) % n
    windows = x[..., idx]
    return windows @ lo, windows @ hi


def _inverse_filter_axis(a: np.ndarray, d: np.ndarray, basis: WaveletBasis) -> np.ndarray:
    """Transpose of the orthogonal analysis map: upsample + periodic synthesis filtering."""
    lo = np.asarray(basis.analysis_lowpass)
    hi = np.asarray(basis.analysis_highpass)
    n = 2 * a.shape[-1]
    u = np.zeros(a.shape[:-1] + (n,), dtype=np.float64)
    v = np.zeros_like(u)
    u[..., 0::2] = a
    v[..., 0::2] = d
    x = np.zeros_like(u)
    for k in range(len(lo)):
        x += lo[k] * np.roll(u, k, axis=-1)
        x += hi[k] * np.roll(v, k, axis=-1)
    return x


def _shift_in_from_right(s: np.ndarray) -> np.ndarray:
    # value at i becomes s[i+1]; last entry mirrors back onto itself
    return np.concatenate([s[..., 1:], s[..., -1:]], axis=-1)


def _shift_in_from_left(d: np.ndarray) -> np.ndarray:
    # value at i becomes d[i-1]; first entry mirrors back onto itself
    return np.concatenate([d[..., :1], d[..., :-1]], axis=-1)


def _forward_lifting_axis(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """CDF 9/7 analysis lifting with whole-sample symmetric boundaries (even length)."""
    s = x[..., 0::2].copy()
    d = x[..., 1::2].copy()
    d += CDF97_ALPHA * (s + _shift_in_from_right(s))
    s += CDF97_BETA * (d + _shift_in_from_left(d))
    d += CDF97_GAMMA * (s + _shift_in_from_right(s))
    s += CDF97_DELTA * (d + _shift_in_from_left(d))
    return CDF97_ZETA * s, d / CDF97_ZETA


def _inverse_lifting_axis(a: np.ndarray, d: np.ndarray) -> np.ndarray:
    s = a / CDF97_ZETA
    dd = d * CDF97_ZETA
    s -= CDF97_DELTA * (dd + _shift_in_from_left(dd))
    dd -= CDF97_GAMMA * (s + _shift_in_from_right(s))
    s -= CDF97_BETA * (dd + _shift_in_from_left(dd))
    dd -= CDF97_ALPHA * (s + _shift_in_from_right(s))
    x = np.zeros(a.shape[:-1] + (2 * a.shape[-1],), dtype=np.float64)
    x[..., 0::2] = s
    x[..., 1::2] = dd
    return x


def _forward_axis(x: np.ndarray, basis: WaveletBasis) -> tuple[np.ndarray, np.ndarray]:
    if basis.uses_lifting:
        return _forward_lifting_axis(x)
    return _forward_filter_axis(x, basis)


def _inverse_axis(a: np.ndarray, d: np.ndarray, basis: WaveletBasis) -> np.ndarray:
    if basis.uses_lifting:
        return _inverse_lifting_axis(a, d)
    return _inverse_filter_axis(a, d, basis)


# --- public 1-D operations ----------------------------------------------------------


def dwt1d_forward(signal, basis: WaveletBasis) -> tuple[np.ndarray, np.ndarray]:
    """Split an even-length signal into half-length approximation and detail."""
    x = np.asarray(signal, dtype=np.float64)
    if x.ndim != 1:
        raise OddLengthSignal("dwt1d_forward expects a 1-D signal")
    if x.size < 2:
        raise SignalTooShort(f"signal of length {x.size} is too short to transform")
    if x.size % 2 != 0:
        raise OddLengthSignal(f"signal length {x.size} is odd; pad before transforming")
    a, d = _forward_axis(x[None, :], basis)
    return a[0], d[0]


def dwt1d_inverse(approx, detail, basis: WaveletBasis) -> np.ndarray:
    a = np.asarray(approx, dtype=np.float64)
    d = np.asarray(detail, dtype=np.float64)
    if a.shape != d.shape:
        raise BandLengthMismatch(f"approx length {a.size} != detail length {d.size}")
    return _inverse_axis(a[None, :], d[None, :], basis)[0]


# --- 2-D level and pyramids ---------------------------------------------------------


@dataclass(frozen=True)
class LevelBands:
    ll: np.ndarray
    lh: np.ndarray
    hl: np.ndarray
    hh: np.ndarray
    pad: tuple[int, int]  # (right, bottom)


def _pad_to_even(plane: np.ndarray) -> tuple[np.ndarray, tuple[int, int]]:
    h, w = plane.shape
    pad_r = w % 2
    pad_b = h % 2
    if pad_r or pad_b:
        plane = np.pad(plane, ((0, pad_b), (0, pad_r)), mode="edge")
    return plane, (pad_r, pad_b)


def dwt2d_level(plane: np.ndarray, basis: WaveletBasis) -> LevelBands:
    """One separable analysis level: rows first, then columns.

    Band naming follows (row-filter, column-filter) order, so LH is lowpass
    along rows and highpass down columns.
    """
    p = np.asarray(plane, dtype=np.float64)
    if p.ndim != 2 or p.size == 0:
        raise EmptyPlane(f"cannot transform plane of shape {p.shape}")
    p, pad = _pad_to_even(p)
    lo_rows, hi_rows = _forward_axis(p, basis)
    ll, lh = (b.T for b in _forward_axis(lo_rows.T, basis))
    hl, hh = (b.T for b in _forward_axis(hi_rows.T, basis))
    return LevelBands(ll=ll, lh=lh, hl=hl, hh=hh, pad=pad)


def _idwt2d_level(ll, lh, hl, hh, basis: WaveletBasis) -> np.ndarray:
    lo_rows = _inverse_axis(ll.T, lh.T, basis).T
    hi_rows = _inverse_axis(hl.T, hh.T, basis).T
    return _inverse_axis(lo_rows, hi_rows, basis)


def max_levels(width: int, height: int) -> int:
    """Largest valid decomposition depth: every level must see a >=2 sample axis."""
    n = min(width, height)
    levels = 0
    while n >= 2:
        levels += 1
        n = (n + 1) // 2
    return levels


def decompose_plane(plane: np.ndarray, basis: WaveletBasis, levels: int) -> Pyramid:
    p = np.asarray(plane, dtype=np.float64)
    if p.ndim != 2 or p.size == 0:
        raise EmptyPlane(f"cannot decompose plane of shape {p.shape}")
    h, w = p.shape
    allowed = max_levels(w, h)
    if levels < 1 or levels > allowed:
        raise TooManyLevels(levels, allowed)
    details: list[DetailTriple] = []
    pad_log: list[tuple[int, int]] = []
    ll = p
    for level in range(1, levels + 1):
        bands = dwt2d_level(ll, basis)
        pad_log.append(bands.pad)
        details.append(
            DetailTriple(
                lh=Subband(BandKind.LH, level, bands.lh),
                hl=Subband(BandKind.HL, level, bands.hl),
                hh=Subband(BandKind.HH, level, bands.hh),
            )
        )
        ll = bands.ll
    return Pyramid(
        basis=basis,
        levels=levels,
        approx=Subband(BandKind.LL, levels, ll),
        details=details,
        original_size=(w, h),
        pad_log=pad_log,
    )


def decompose(frame: Frame, basis: WaveletBasis, levels: int) -> list[Pyramid]:
    """Per-channel multi-level decomposition of a frame."""
    return [decompose_plane(p, basis, levels) for p in frame.planes]


def reconstruct(pyramid: Pyramid) -> np.ndarray:
    """Invert decompose_plane, cropping any padding recorded per level."""
    if len(pyramid.details) != pyramid.levels or len(pyramid.pad_log) != pyramid.levels:
        raise CorruptPyramid(
            f"pyramid claims {pyramid.levels} levels but carries "
            f"{len(pyramid.details)} detail triples and {len(pyramid.pad_log)} pad entries"
        )
    ll = pyramid.approx.plane
    for level in range(pyramid.levels, 0, -1):
        triple = pyramid.details[level - 1]
        for band in triple.bands():
            if band.plane.shape != ll.shape:
                raise CorruptPyramid(
                    f"level {level} band {band.kind.value} has shape {band.plane.shape}, "
                    f"expected {ll.shape}"
                )
        ll = _idwt2d_level(ll, triple.lh.plane, triple.hl.plane, triple.hh.plane, pyramid.basis)
        pad_r, pad_b = pyramid.pad_log[level - 1]
        if pad_b:
            ll = ll[:-1, :]
        if pad_r:
            ll = ll[:, :-1]
    w, h = pyramid.original_size
    if ll.shape != (h, w):
        raise CorruptPyramid(f"reconstructed shape {ll.shape} != original {(h, w)}")
    return ll


# --- debug serialization (WPYR dump) -------------------------------------------------

_WPYR_MAGIC = b"WPYR"
_BASIS_CODES = {BasisId.HAAR: 0, BasisId.DB4: 1, BasisId.CDF97: 2}
_BASIS_FROM_CODE = {v: k for k, v in _BASIS_CODES.items()}


def serialize_pyramid(pyramid: Pyramid) -> bytes:
    """Flat little-endian float32 coefficient dump with a small self-describing header.

    Layout: magic "WPYR" | u8 basis | u8 levels | u32 orig_w | u32 orig_h |
    per-level u8 pad_right, u8 pad_bottom | per-band u32 w, u32 h | band planes
    as float32 in order LL then level 1..L (LH, HL, HH), row-major.
    """
    out = bytearray()
    out += _WPYR_MAGIC
    out += struct.pack("<BB", _BASIS_CODES[pyramid.basis.id], pyramid.levels)
    out += struct.pack("<II", *pyramid.original_size)
    for pad_r, pad_b in pyramid.pad_log:
        out += struct.pack("<BB", pad_r, pad_b)
    bands = [pyramid.approx] + [b for t in pyramid.details for b in t.bands()]
    for band in bands:
        h, w = band.plane.shape
        out += struct.pack("<II", w, h)
    for band in bands:
        out += band.plane.astype("<f4").tobytes()
    return bytes(out)


def deserialize_pyramid(data: bytes) -> Pyramid:
    if data[:4] != _WPYR_MAGIC:
        raise CorruptPyramid("missing WPYR magic")
    pos = 4
    basis_code, levels = struct.unpack_from("<BB", data, pos)
    pos += 2
    if basis_code not in _BASIS_FROM_CODE:
        raise CorruptPyramid(f"unknown basis code {basis_code}")
    orig_w, orig_h = struct.unpack_from("<II", data, pos)
    pos += 8
    pad_log = []
    for _ in range(levels):
        pad_r, pad_b = struct.unpack_from("<BB", data, pos)
        pos += 2
        pad_log.append((pad_r, pad_b))
    dims = []
    for _ in range(1 + 3 * levels):
        w, h = struct.unpack_from("<II", data, pos)
        pos += 8
        dims.append((w, h))
    planes = []
    for w, h in dims:
        count = w * h
        plane = np.frombuffer(data, dtype="<f4", count=count, offset=pos)
        if plane.size != count:
            raise CorruptPyramid("truncated coefficient payload")
        pos += 4 * count
        planes.append(plane.reshape(h, w).astype(np.float64))
    basis = get_basis(_BASIS_FROM_CODE[basis_code])
    approx = Subband(BandKind.LL, levels, planes[0])
    details = []
    for level in range(1, levels + 1):
        base = 1 + 3 * (level - 1)
        details.append(
            DetailTriple(
                lh=Subband(BandKind.LH, level, planes[base]),
                hl=Subband(BandKind.HL, level, planes[base + 1]),
                hh=Subband(BandKind.HH, level, planes[base + 2]),
            )
        )
    return Pyramid(
        basis=basis,
        levels=levels,
        approx=approx,
        details=details,
        original_size=(orig_w, orig_h),
        pad_log=pad_log,
    )
