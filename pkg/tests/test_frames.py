import numpy as np
import pytest

from wavescrub.errors import InvalidColorspace, RegionOutOfBounds
from wavescrub.frames import (
    Colorspace,
    Frame,
    Region,
    crop,
    frame_from_planes,
    full_region,
    gray_frame,
    luma,
    rgb_to_ycbcr,
    ycbcr_to_rgb,
)


def rgb(r, g, b) -> Frame:
    return frame_from_planes(
        [np.full((2, 2), r), np.full((2, 2), g), np.full((2, 2), b)], Colorspace.RGB
    )


def affine_inverse_oracle():
    """Invert the forward 3x3 affine color map numerically."""
    m = np.array(
        [
            [0.299, 0.587, 0.114],
            [0.564 * -0.299, 0.564 * -0.587, 0.564 * (1 - 0.114)],
            [0.713 * (1 - 0.299), 0.713 * -0.587, 0.713 * -0.114],
        ]
    )
    offset = np.array([0.0, 0.5, 0.5])
    m_inv = np.linalg.inv(m)
    return lambda ycc: m_inv @ (ycc - offset)


class TestColorConversion:
    def test_gray_maps_to_zero_chroma_offset(self):
        out = rgb_to_ycbcr(rgb(0.5, 0.5, 0.5))
        assert np.allclose(out.planes[0], 0.5)
        assert np.allclose(out.planes[1], 0.5)
        assert np.allclose(out.planes[2], 0.5)

    def test_pure_red(self):
        out = rgb_to_ycbcr(rgb(1.0, 0.0, 0.0))
        assert abs(out.planes[0][0, 0] - 0.299) < 1e-12
        assert abs(out.planes[2][0, 0] - (0.5 + 0.701 * 0.713)) < 1e-12
        assert abs(out.planes[2][0, 0] - 0.99981) < 1e-4

    def test_roundtrip_against_affine_inverse(self):
        rng = np.random.default_rng(0)
        pixels = rng.uniform(0, 1, size=(1000, 3))
        planes = tuple(pixels[:, i].reshape(40, 25) for i in range(3))
        frame = Frame(planes, Colorspace.RGB)
        back = ycbcr_to_rgb(rgb_to_ycbcr(frame))
        worst = max(
            float(np.max(np.abs(a - b))) for a, b in zip(back.planes, frame.planes)
        )
        assert worst <= 1e-5
        # independent oracle: numerically inverted affine map agrees
        inverse = affine_inverse_oracle()
        ycc_frame = rgb_to_ycbcr(frame)
        sample = np.array([p[0, 0] for p in ycc_frame.planes])
        np.testing.assert_allclose(inverse(sample), pixels[0], atol=1e-9)

    def test_neutral_ycbcr_is_mid_gray(self):
        ycc = frame_from_planes([np.full((2, 2), 0.5)] * 3, Colorspace.YCBCR)
        out = ycbcr_to_rgb(ycc)
        for p in out.planes:
            assert np.allclose(p, 0.5)

    def test_out_of_gamut_clamped(self):
        ycc = frame_from_planes([np.zeros((2, 2))] * 3, Colorspace.YCBCR)
        out = ycbcr_to_rgb(ycc)
        for p in out.planes:
            assert np.all((p >= 0.0) & (p <= 1.0))

    def test_wrong_colorspace_rejected(self):
        with pytest.raises(InvalidColorspace):
            rgb_to_ycbcr(gray_frame(np.zeros((2, 2))))
        with pytest.raises(InvalidColorspace):
            ycbcr_to_rgb(rgb(0.1, 0.2, 0.3))

    def test_conversion_is_per_pixel(self):
        rng = np.random.default_rng(1)
        planes = tuple(rng.uniform(0, 1, (6, 6)) for _ in range(3))
        frame = Frame(planes, Colorspace.RGB)
        perm = rng.permutation(36)
        permuted = Frame(
            tuple(p.ravel()[perm].reshape(6, 6) for p in planes), Colorspace.RGB
        )
        a = rgb_to_ycbcr(frame)
        b = rgb_to_ycbcr(permuted)
        for pa, pb in zip(a.planes, b.planes):
            np.testing.assert_allclose(pa.ravel()[perm], pb.ravel(), atol=1e-12)


class TestFrameInvariants:
    def test_channel_count_enforced(self):
        with pytest.raises(InvalidColorspace):
            Frame((np.zeros((2, 2)),), Colorspace.RGB)

    def test_mismatched_plane_shapes_rejected(self):
        with pytest.raises(InvalidColorspace):
            Frame((np.zeros((2, 2)), np.zeros((2, 3)), np.zeros((2, 2))), Colorspace.RGB)

    def test_non_finite_samples_rejected(self):
        plane = np.zeros((2, 2))
        plane[0, 0] = np.nan
        with pytest.raises(InvalidColorspace):
            gray_frame(plane)

    def test_luma_of_rgb(self):
        f = rgb(1.0, 0.0, 0.0)
        assert abs(luma(f)[0, 0] - 0.299) < 1e-12


class TestCrop:
    def test_full_frame_crop_is_identity(self):
        rng = np.random.default_rng(2)
        f = gray_frame(rng.uniform(0, 1, (5, 7)))
        out = crop(f, full_region(f))
        np.testing.assert_array_equal(out.planes[0], f.planes[0])

    def test_bottom_right_subblock(self):
        plane = np.arange(16, dtype=np.float64).reshape(4, 4)
        out = crop(gray_frame(plane), Region(2, 2, 2, 2))
        np.testing.assert_array_equal(out.planes[0], plane[2:4, 2:4])

    def test_out_of_bounds_region(self):
        with pytest.raises(RegionOutOfBounds):
            crop(gray_frame(np.zeros((4, 4))), Region(3, 3, 2, 2))

    def test_degenerate_region_rejected(self):
        with pytest.raises(RegionOutOfBounds):
            Region(0, 0, 0, 2)

    def test_crop_composition(self):
        rng = np.random.default_rng(3)
        f = gray_frame(rng.uniform(0, 1, (10, 12)))
        a = Region(2, 3, 8, 6)
        b = Region(1, 2, 4, 3)
        composed = Region(a.x + b.x, a.y + b.y, b.w, b.h)
        np.testing.assert_array_equal(
            crop(crop(f, a), b).planes[0], crop(f, composed).planes[0]
        )
