import io

import numpy as np
import pytest

from wavescrub import video_io
from wavescrub.errors import (
    BadMagic,
    BadSignature,
    FrameMarkerMissing,
    HeaderParamMissing,
    ShortFrame,
    TruncatedPayload,
    UnsupportedFormat,
    UnsupportedMaxval,
    VideoIoError,
)
from wavescrub.frames import Colorspace, Frame
from wavescrub.video_io import Chroma, VideoStreamHeader


def random_rgb_bytes(rng, w, h) -> bytes:
    header = f"P6\n{w} {h}\n255\n".encode()
    return header + rng.integers(0, 256, size=w * h * 3, dtype=np.uint8).tobytes()


def studio_frame(rng, w, h) -> Frame:
    y = rng.integers(16, 236, size=(h, w)).astype(np.float64)
    cb = rng.integers(16, 241, size=(h, w)).astype(np.float64)
    cr = rng.integers(16, 241, size=(h, w)).astype(np.float64)
    return Frame(((y - 16) / 219, (cb - 16) / 224, (cr - 16) / 224), Colorspace.YCBCR)


class TestPpm:
    def test_minimal_red_pixel(self):
        frame = video_io.read_ppm(b"P6\n1 1\n255\n\xff\x00\x00")
        assert frame.width == 1 and frame.height == 1
        assert frame.planes[0][0, 0] == 1.0
        assert frame.planes[1][0, 0] == 0.0
        assert frame.planes[2][0, 0] == 0.0

    def test_comments_and_odd_whitespace(self):
        data = b"P6 # a comment\n# another\n 2\t1 # dims\n255\n" + bytes(6)
        frame = video_io.read_ppm(data)
        assert frame.width == 2 and frame.height == 1

    def test_write_read_write_byte_identity(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            w = int(rng.integers(1, 24))
            h = int(rng.integers(1, 24))
            original = random_rgb_bytes(rng, w, h)
            recoded = video_io.write_ppm(video_io.read_ppm(original))
            assert recoded == original

    def test_bad_magic(self):
        with pytest.raises(BadMagic):
            video_io.read_ppm(b"P5\n1 1\n255\n\x00")

    def test_unsupported_maxval(self):
        with pytest.raises(UnsupportedMaxval):
            video_io.read_ppm(b"P6\n1 1\n65535\n\x00\x00\x00\x00\x00\x00")

    def test_truncated_payload(self):
        with pytest.raises(TruncatedPayload):
            video_io.read_ppm(b"P6\n2 2\n255\n\x00\x00\x00")

    def test_quantization_round_half_up(self):
        plane = np.array([[0.5]])
        frame = Frame((plane, plane, plane), Colorspace.RGB)
        data = video_io.write_ppm(frame)
        assert data.endswith(bytes([128, 128, 128]))

    def test_out_of_range_clamped_on_write(self):
        plane = np.array([[1.7]])
        low = np.array([[-0.3]])
        frame = Frame((plane, low, plane), Colorspace.RGB)
        assert video_io.write_ppm(frame).endswith(bytes([255, 0, 255]))


class TestY4mHeader:
    def test_minimal_c420(self):
        header, frames = video_io.read_y4m_bytes(
            b"YUV4MPEG2 W2 H2 F25:1 C420\nFRAME\n" + bytes([100, 100, 100, 100, 128, 128])
        )
        assert header.width == 2 and header.height == 2
        assert header.chroma is Chroma.C420
        assert len(frames) == 1
        assert frames[0].width == 2 and frames[0].height == 2

    def test_missing_signature(self):
        with pytest.raises(BadSignature):
            video_io.read_y4m_bytes(b"RIFF1234")

    @pytest.mark.parametrize("line,param", [
        (b"YUV4MPEG2 H2 F25:1\n", "W"),
        (b"YUV4MPEG2 W2 F25:1\n", "H"),
        (b"YUV4MPEG2 W2 H2\n", "F"),
    ])
    def test_missing_required_params(self, line, param):
        with pytest.raises(HeaderParamMissing) as err:
            video_io.read_y4m_bytes(line)
        assert err.value.param == param

    def test_unsupported_chroma(self):
        with pytest.raises(UnsupportedFormat):
            video_io.read_y4m_bytes(b"YUV4MPEG2 W2 H2 F25:1 C422\n")

    def test_c420_odd_dims_rejected(self):
        with pytest.raises(UnsupportedFormat):
            video_io.read_y4m_bytes(b"YUV4MPEG2 W3 H2 F25:1 C420\n")

    def test_interlace_aspect_retained(self):
        stream = b"YUV4MPEG2 W2 H2 F30:1 Ip A1:1 C444\n"
        header, _ = video_io.read_y4m_bytes(stream)
        assert header.interlace == "p"
        assert header.aspect == "1:1"
        assert header.header_line() == stream


class TestY4mFrames:
    def test_c444_write_read_roundtrip_byte_identical(self):
        rng = np.random.default_rng(1)
        header = VideoStreamHeader(width=6, height=4, fps=(30, 1), chroma=Chroma.C444, chroma_tag="444")
        frames = [studio_frame(rng, 6, 4) for _ in range(3)]
        encoded = video_io.write_y4m_bytes(header, frames)
        header2, decoded = video_io.read_y4m_bytes(encoded)
        assert header2 == header
        re_encoded = video_io.write_y4m_bytes(header2, decoded)
        assert re_encoded == encoded

    def test_c420_second_pass_idempotent(self):
        rng = np.random.default_rng(2)
        header = VideoStreamHeader(width=8, height=6, fps=(25, 1))
        frames = [studio_frame(rng, 8, 6) for _ in range(2)]
        first = video_io.write_y4m_bytes(header, frames)
        h1, d1 = video_io.read_y4m_bytes(first)
        second = video_io.write_y4m_bytes(h1, d1)
        h2, d2 = video_io.read_y4m_bytes(second)
        third = video_io.write_y4m_bytes(h2, d2)
        assert third == second

    def test_missing_frame_marker_mid_stream(self):
        good = b"FRAME\n" + bytes(6)
        stream = b"YUV4MPEG2 W2 H2 F25:1 C420\n" + good + b"JUNK__\n" + bytes(6)
        with pytest.raises(FrameMarkerMissing) as err:
            video_io.read_y4m_bytes(stream)
        assert err.value.frame_index == 1

    def test_short_frame(self):
        stream = b"YUV4MPEG2 W2 H2 F25:1 C420\nFRAME\n" + bytes(3)
        with pytest.raises(ShortFrame) as err:
            video_io.read_y4m_bytes(stream)
        assert err.value.frame_index == 0

    def test_frame_params_allowed(self):
        stream = b"YUV4MPEG2 W2 H2 F25:1 C420\nFRAME Xsome=param\n" + bytes(6)
        _, frames = video_io.read_y4m_bytes(stream)
        assert len(frames) == 1

    def test_studio_range_mapping(self):
        payload = bytes([16, 235, 16, 235]) + bytes([16, 240])
        _, frames = video_io.read_y4m_bytes(b"YUV4MPEG2 W2 H2 F25:1 C420\nFRAME\n" + payload)
        y = frames[0].planes[0]
        assert y[0, 0] == 0.0 and y[0, 1] == 1.0
        assert frames[0].planes[1][0, 0] == 0.0
        assert frames[0].planes[2][0, 0] == 1.0

    def test_write_wrong_colorspace_rejected(self):
        header = VideoStreamHeader(width=2, height=2, fps=(25, 1))
        frame = Frame(tuple(np.zeros((2, 2)) for _ in range(3)), Colorspace.RGB)
        with pytest.raises(UnsupportedFormat):
            video_io.write_y4m_bytes(header, [frame])


class TestFuzz:
    def test_fuzzed_headers_never_crash(self):
        rng = np.random.default_rng(1234)
        seeds = [
            b"P6\n4 4\n255\n" + bytes(48),
            b"YUV4MPEG2 W4 H4 F25:1 C444\nFRAME\n" + bytes(48),
        ]
        cases = 0
        for _ in range(2000):
            base = bytearray(seeds[rng.integers(0, 2)])
            for _ in range(rng.integers(1, 6)):
                op = rng.integers(0, 3)
                if op == 0 and len(base) > 1:
                    del base[rng.integers(0, len(base))]
                elif op == 1:
                    base.insert(rng.integers(0, len(base) + 1), rng.integers(0, 256))
                else:
                    base[rng.integers(0, len(base))] = rng.integers(0, 256)
            blob = bytes(base)
            for parse in (video_io.read_ppm, lambda b: video_io.read_y4m_bytes(b)):
                cases += 1
                try:
                    parse(blob)
                except VideoIoError:
                    pass
        assert cases == 4000
