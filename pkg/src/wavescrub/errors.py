"""Typed exceptions raised across the package.

Every failure mode callers are expected to handle gets its own class so the
CLI and service can map errors to exit codes / HTTP statuses without string
matching.
"""


class WavescrubError(Exception):
    """Base class for all package errors."""


# --- frame / region errors ---------------------------------------------------

class InvalidColorspace(WavescrubError):
    pass


class RegionOutOfBounds(WavescrubError):
    pass


# --- wavelet transform errors ------------------------------------------------

class OddLengthSignal(WavescrubError):
    pass


class SignalTooShort(WavescrubError):
    pass


class BandLengthMismatch(WavescrubError):
    pass


class EmptyPlane(WavescrubError):
    pass


class TooManyLevels(WavescrubError):
    def __init__(self, requested: int, max_allowed: int):
        super().__init__(f"requested {requested} levels, at most {max_allowed} possible")
        self.requested = requested
        self.max_allowed = max_allowed


class CorruptPyramid(WavescrubError):
    pass


# --- anonymizer parameter errors ----------------------------------------------

class PolicyLevelMismatch(WavescrubError):
    pass


class InvalidDepth(WavescrubError):
    pass


class InvalidGain(WavescrubError):
    pass


class InvalidSigma(WavescrubError):
    pass


class InvalidFactor(WavescrubError):
    pass


class TooManySegments(WavescrubError):
    pass


class InvalidSegments(WavescrubError):
    pass


# --- metrics errors ------------------------------------------------------------

class DimMismatch(WavescrubError):
    pass


class FrameTooSmall(WavescrubError):
    pass


class DegenerateContrast(WavescrubError):
    pass


# --- codec errors ----------------------------------------------------------------

class VideoIoError(WavescrubError):
    """Base class for PPM / Y4M parse and encode failures."""


class BadMagic(VideoIoError):
    pass


class MalformedHeader(VideoIoError):
    pass


class TruncatedPayload(VideoIoError):
    pass


class UnsupportedMaxval(VideoIoError):
    pass


class BadSignature(VideoIoError):
    pass


class HeaderParamMissing(VideoIoError):
    def __init__(self, param: str):
        super().__init__(f"required y4m header parameter missing: {param}")
        self.param = param


class UnsupportedFormat(VideoIoError):
    pass


class FrameMarkerMissing(VideoIoError):
    def __init__(self, frame_index: int):
        super().__init__(f"expected FRAME marker before frame {frame_index}")
        self.frame_index = frame_index


class ShortFrame(VideoIoError):
    def __init__(self, frame_index: int, expected: int, got: int):
        super().__init__(f"frame {frame_index}: expected {expected} payload bytes, got {got}")
        self.frame_index = frame_index
        self.expected = expected
        self.got = got


# --- scene / config errors ---------------------------------------------------------

class SceneTooSmall(WavescrubError):
    pass


class ConfigError(WavescrubError):
    pass
