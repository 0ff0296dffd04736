"""Dependency-free frame I/O: binary PPM (P6) stills and YUV4MPEG2 streams.

Only 8-bit content is supported; anything else is rejected with a typed error.
PPM is full-range RGB. Y4M is studio-range planar YCbCr: Y maps 16..235 and
chroma 16..240 onto the unit interval. 4:2:0 chroma is upsampled by sample
replication on read and box-averaged on write, a pair chosen so that a second
write/read pass is byte-identical to the first.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from enum import Enum
from typing import BinaryIO, Iterable, Iterator, Optional

import numpy as np

from .errors import (
    BadMagic,
    BadSignature,
    FrameMarkerMissing,
    HeaderParamMissing,
    MalformedHeader,
    ShortFrame,
    TruncatedPayload,
    UnsupportedFormat,
    UnsupportedMaxval,
)
from .frames import Colorspace, Frame

_MAX_HEADER_LINE = 4096
_MAX_DIM = 1 << 20


# --- PPM (P6) ------------------------------------------------------------------


def _ppm_tokens(data: bytes, count: int, start: int) -> tuple[list[bytes], int]:
    """Read whitespace-separated header tokens, skipping '#' comments to end of line."""
    tokens: list[bytes] = []
    pos = start
    while len(tokens) < count:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if pos >= len(data):
            raise TruncatedPayload("ppm header ended before all fields were read")
        if data[pos : pos + 1] == b"#":
            eol = data.find(b"\n", pos)
            if eol < 0:
                raise TruncatedPayload("unterminated comment in ppm header")
            pos = eol + 1
            continue
        end = pos
        while end < len(data) and not data[end : end + 1].isspace() and data[end : end + 1] != b"#":
            end += 1
        tokens.append(data[pos:end])
        pos = end
    return tokens, pos


def read_ppm_at(data: bytes, offset: int) -> tuple[Frame, int]:
    """Parse one P6 image starting at offset; returns (frame, end offset).

    Lets callers walk a stream of back-to-back PPM images.
    """
    if data[offset : offset + 2] != b"P6":
        raise BadMagic(f"expected P6 magic, got {data[offset : offset + 2]!r}")
    tokens, pos = _ppm_tokens(data, 3, offset + 2)
    try:
        width, height, maxval = (int(t) for t in tokens)
    except ValueError:
        raise MalformedHeader(f"non-numeric ppm header fields: {tokens!r}") from None
    if width < 1 or height < 1 or width > _MAX_DIM or height > _MAX_DIM:
        raise MalformedHeader(f"bad ppm dimensions {width}x{height}")
    if maxval != 255:
        raise UnsupportedMaxval(f"only maxval 255 is supported, got {maxval}")
    if pos >= len(data) or not data[pos : pos + 1].isspace():
        raise MalformedHeader("missing single whitespace after maxval")
    pos += 1
    expected = width * height * 3
    payload = data[pos : pos + expected]
    if len(payload) != expected:
        raise TruncatedPayload(f"expected {expected} payload bytes, got {len(payload)}")
    samples = np.frombuffer(payload, dtype=np.uint8).astype(np.float64) / 255.0
    pixels = samples.reshape(height, width, 3)
    frame = Frame((pixels[:, :, 0], pixels[:, :, 1], pixels[:, :, 2]), Colorspace.RGB)
    return frame, pos + expected


def read_ppm(data: bytes) -> Frame:
    """Parse a binary P6 file with maxval 255 into an RGB frame."""
    frame, _ = read_ppm_at(data, 0)
    return frame


def _quantize(plane: np.ndarray, scale: float, offset: float, lo: int, hi: int) -> np.ndarray:
    # clamp first, then round half up
    values = np.floor(plane * scale + offset + 0.5)
    return np.clip(values, lo, hi).astype(np.uint8)


def write_ppm(frame: Frame) -> bytes:
    """Encode an RGB frame as canonical P6: 'P6\\n{w} {h}\\n255\\n' + payload."""
    if frame.colorspace is not Colorspace.RGB:
        raise UnsupportedFormat(f"ppm output needs rgb frames, got {frame.colorspace.value}")
    header = f"P6\n{frame.width} {frame.height}\n255\n".encode("ascii")
    stacked = np.stack([_quantize(p, 255.0, 0.0, 0, 255) for p in frame.planes], axis=-1)
    return header + stacked.tobytes()


# --- Y4M (YUV4MPEG2) ----------------------------------------------------------------


class Chroma(str, Enum):
    C420 = "C420"
    C444 = "C444"


_C420_TAGS = {"420", "420jpeg", "420mpeg2", "420paldv"}


@dataclass(frozen=True)
class VideoStreamHeader:
    width: int
    height: int
    fps: tuple[int, int]
    chroma: Chroma = Chroma.C420
    chroma_tag: str = "420"
    interlace: Optional[str] = None  # retained verbatim
    aspect: Optional[str] = None     # retained verbatim
    extras: tuple[str, ...] = field(default_factory=tuple)

    def header_line(self) -> bytes:
        parts = [f"YUV4MPEG2 W{self.width} H{self.height} F{self.fps[0]}:{self.fps[1]}"]
        if self.interlace is not None:
            parts.append(f"I{self.interlace}")
        if self.aspect is not None:
            parts.append(f"A{self.aspect}")
        parts.append(f"C{self.chroma_tag}")
        parts.extend(self.extras)
        return (" ".join(parts) + "\n").encode("ascii")


def _parse_y4m_header(line: bytes) -> VideoStreamHeader:
    try:
        text = line.decode("ascii")
    except UnicodeDecodeError:
        raise BadSignature("y4m header is not ascii") from None
    fields = text.rstrip("\n").split(" ")
    if fields[0] != "YUV4MPEG2":
        raise BadSignature(f"stream does not start with YUV4MPEG2: {fields[0]!r}")
    width = height = None
    fps = None
    chroma_tag = None
    interlace = aspect = None
    extras: list[str] = []
    for token in fields[1:]:
        if not token:
            continue
        key, value = token[0], token[1:]
        if key == "W":
            width = _positive_int(value, "W")
        elif key == "H":
            height = _positive_int(value, "H")
        elif key == "F":
            num, _, den = value.partition(":")
            try:
                fps = (int(num), int(den))
            except ValueError:
                raise MalformedHeader(f"bad frame rate {value!r}") from None
            if fps[0] < 1 or fps[1] < 1:
                raise MalformedHeader(f"bad frame rate {value!r}")
        elif key == "C":
            chroma_tag = value
        elif key == "I":
            interlace = value
        elif key == "A":
            aspect = value
        elif key == "X":
            extras.append(token)
        else:
            raise MalformedHeader(f"unknown y4m header token {token!r}")
    if width is None:
        raise HeaderParamMissing("W")
    if height is None:
        raise HeaderParamMissing("H")
    if fps is None:
        raise HeaderParamMissing("F")
    if chroma_tag is None:
        chroma_tag = "420"
    if chroma_tag in _C420_TAGS:
        chroma = Chroma.C420
    elif chroma_tag == "444":
        chroma = Chroma.C444
    else:
        raise UnsupportedFormat(f"unsupported chroma mode C{chroma_tag}")
    if chroma is Chroma.C420 and (width % 2 or height % 2):
        raise UnsupportedFormat(f"C420 requires even dimensions, got {width}x{height}")
    return VideoStreamHeader(
        width=width,
        height=height,
        fps=fps,
        chroma=chroma,
        chroma_tag=chroma_tag,
        interlace=interlace,
        aspect=aspect,
        extras=tuple(extras),
    )


def _positive_int(value: str, param: str) -> int:
    try:
        number = int(value)
    except ValueError:
        raise MalformedHeader(f"bad {param} value {value!r}") from None
    if number < 1 or number > _MAX_DIM:
        raise MalformedHeader(f"bad {param} value {value!r}")
    return number


def _read_line(stream: BinaryIO, error: Exception) -> bytes:
    line = stream.readline(_MAX_HEADER_LINE)
    if not line.endswith(b"\n"):
        raise error
    return line


_Y_SCALE = 219.0
_Y_OFFSET = 16.0
_C_SCALE = 224.0
_C_OFFSET = 16.0


def _luma_to_unit(raw: np.ndarray) -> np.ndarray:
    return (raw.astype(np.float64) - _Y_OFFSET) / _Y_SCALE


def _chroma_to_unit(raw: np.ndarray) -> np.ndarray:
    return (raw.astype(np.float64) - _C_OFFSET) / _C_SCALE


def _replicate2(plane: np.ndarray) -> np.ndarray:
    return plane.repeat(2, axis=0).repeat(2, axis=1)


def _box2(plane: np.ndarray) -> np.ndarray:
    h, w = plane.shape
    return plane.reshape(h // 2, 2, w // 2, 2).mean(axis=(1, 3))


class FrameSequence:
    """Single-consumer pull-based frame source with its stream header."""

    def __init__(self, header: VideoStreamHeader, frames: Iterator[Frame]):
        self.header = header
        self._frames = frames

    def __iter__(self) -> Iterator[Frame]:
        return self._frames


def read_y4m(stream: BinaryIO) -> FrameSequence:
    header = _parse_y4m_header(_read_line(stream, BadSignature("missing y4m header line")))

    def frames() -> Iterator[Frame]:
        w, h = header.width, header.height
        if header.chroma is Chroma.C420:
            cw, ch = w // 2, h // 2
        else:
            cw, ch = w, h
        frame_bytes = w * h + 2 * cw * ch
        index = 0
        while True:
            marker = stream.readline(_MAX_HEADER_LINE)
            if marker == b"":
                return
            if (
                not marker.startswith(b"FRAME")
                or not marker.endswith(b"\n")
                or marker[5:6] not in (b"\n", b" ")
            ):
                raise FrameMarkerMissing(index)
            payload = stream.read(frame_bytes)
            if len(payload) != frame_bytes:
                raise ShortFrame(index, frame_bytes, len(payload))
            raw = np.frombuffer(payload, dtype=np.uint8)
            y = _luma_to_unit(raw[: w * h].reshape(h, w))
            cb = _chroma_to_unit(raw[w * h : w * h + cw * ch].reshape(ch, cw))
            cr = _chroma_to_unit(raw[w * h + cw * ch :].reshape(ch, cw))
            if header.chroma is Chroma.C420:
                cb = _replicate2(cb)
                cr = _replicate2(cr)
            yield Frame((y, cb, cr), Colorspace.YCBCR)
            index += 1

    return FrameSequence(header, frames())


def write_y4m(header: VideoStreamHeader, frames: Iterable[Frame], stream: BinaryIO) -> int:
    """Write frames in order; returns the frame count."""
    stream.write(header.header_line())
    count = 0
    for frame in frames:
        if frame.colorspace is not Colorspace.YCBCR:
            raise UnsupportedFormat("y4m output needs ycbcr frames")
        if frame.width != header.width or frame.height != header.height:
            raise UnsupportedFormat(
                f"frame {count} is {frame.width}x{frame.height}, "
                f"header says {header.width}x{header.height}"
            )
        y, cb, cr = frame.planes
        if header.chroma is Chroma.C420:
            cb = _box2(cb)
            cr = _box2(cr)
        stream.write(b"FRAME\n")
        stream.write(_quantize(y, _Y_SCALE, _Y_OFFSET, 16, 235).tobytes())
        stream.write(_quantize(cb, _C_SCALE, _C_OFFSET, 16, 240).tobytes())
        stream.write(_quantize(cr, _C_SCALE, _C_OFFSET, 16, 240).tobytes())
        count += 1
    return count


def read_y4m_bytes(data: bytes) -> tuple[VideoStreamHeader, list[Frame]]:
    seq = read_y4m(io.BytesIO(data))
    return seq.header, list(seq)


def write_y4m_bytes(header: VideoStreamHeader, frames: Iterable[Frame]) -> bytes:
    buf = io.BytesIO()
    write_y4m(header, frames, buf)
    return buf.getvalue()
