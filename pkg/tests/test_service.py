import base64

import numpy as np
import pytest
from fastapi.testclient import TestClient

from wavescrub import video_io
from wavescrub.service.app import app


@pytest.fixture(scope="module")
def client():
    return TestClient(app)


@pytest.fixture(scope="module")
def scene_ppm(client) -> bytes:
    response = client.post("/v1/synth", json={})
    assert response.status_code == 200
    return base64.b64decode(response.json()["ppm_b64"])


class TestHealth:
    def test_healthz(self, client):
        response = client.get("/healthz")
        assert response.status_code == 200
        body = response.json()
        assert body["status"] == "ok"
        assert "version" in body


class TestSynthEndpoint:
    def test_synth_returns_scene_and_regions(self, client):
        response = client.post("/v1/synth", json={"width": 256, "height": 256})
        body = response.json()
        assert body["width"] == 256
        assert body["regions"]["far_figure"] == [200, 120, 8, 12]
        frame = video_io.read_ppm(base64.b64decode(body["ppm_b64"]))
        assert frame.width == 256

    def test_synth_rejects_unknown_keys(self, client):
        response = client.post("/v1/synth", json={"width": 256, "depth": 3})
        assert response.status_code == 422

    def test_synth_too_small(self, client):
        response = client.post("/v1/synth", json={"width": 130, "height": 129})
        assert response.status_code == 422


class TestAnonymizeEndpoint:
    def test_ppm_roundtrip(self, client, scene_ppm):
        response = client.post(
            "/v1/anonymize?method=wtaa&basis=haar&levels=4&destroy_finest=2",
            content=scene_ppm,
        )
        assert response.status_code == 200
        assert response.headers["x-frames"] == "1"
        frame = video_io.read_ppm(response.content)
        assert frame.width == 256 and frame.height == 256

    def test_y4m_roundtrip(self, client):
        rng = np.random.default_rng(0)
        from wavescrub.frames import Colorspace, Frame
        from wavescrub.video_io import Chroma, VideoStreamHeader

        frames = []
        for _ in range(3):
            y = (rng.integers(16, 236, size=(24, 32)) - 16) / 219.0
            c = (rng.integers(16, 241, size=(24, 32)) - 16) / 224.0
            frames.append(Frame((y, c.copy(), c), Colorspace.YCBCR))
        header = VideoStreamHeader(width=32, height=24, fps=(25, 1), chroma=Chroma.C444, chroma_tag="444")
        payload = video_io.write_y4m_bytes(header, frames)
        response = client.post("/v1/anonymize?method=gaussian&sigma=1.5", content=payload)
        assert response.status_code == 200
        assert response.headers["x-frames"] == "3"
        out_header, out_frames = video_io.read_y4m_bytes(response.content)
        assert out_header.width == 32 and len(out_frames) == 3

    def test_missing_required_param(self, client, scene_ppm):
        response = client.post("/v1/anonymize?method=gaussian", content=scene_ppm)
        assert response.status_code == 422
        assert response.json()["error"] == "ConfigError"

    def test_undecodable_input(self, client):
        response = client.post("/v1/anonymize?method=gaussian&sigma=2", content=b"not a frame")
        assert response.status_code == 400
        assert response.json()["error"] == "BadMagic"

    def test_unknown_query_param_rejected(self, client, scene_ppm):
        response = client.post("/v1/anonymize?method=gaussian&sigma=2&bogus=1", content=scene_ppm)
        assert response.status_code == 422


class TestCompareEndpoint:
    def test_compare_on_server_scene(self, client):
        response = client.post(
            "/v1/compare",
            json={
                "methods": [
                    {"method": "wtaa", "params": {"basis": "haar", "levels": 4},
                     "sweep": {"destroy_finest": [2, 3]}},
                    {"method": "gaussian", "sweep": {"sigma": [1.5, 1.75]}},
                ]
            },
        )
        assert response.status_code == 200
        body = response.json()
        assert body["frames"] == 1
        wtaa_far = body["methods"][0]["matched"]["metrics"]["regions"]["far_figure"]
        gauss_far = body["methods"][1]["matched"]["metrics"]["regions"]["far_figure"]
        assert wtaa_far["edge_retention"] > gauss_far["edge_retention"]
        # response uses the documented "global" key via alias
        assert "global" in body["methods"][0]["points"][0]["metrics"]

    def test_compare_uploaded_input(self, client, scene_ppm):
        response = client.post(
            "/v1/compare",
            json={
                "methods": [{"method": "downsample", "sweep": {"factor": [4]}}],
                "input_b64": base64.b64encode(scene_ppm).decode(),
                "regions": {
                    "near_figure": [24, 80, 64, 96],
                    "far_figure": [200, 120, 8, 12],
                    "background": [112, 16, 64, 64],
                },
            },
        )
        assert response.status_code == 200

    def test_compare_uploaded_input_needs_regions(self, client, scene_ppm):
        response = client.post(
            "/v1/compare",
            json={
                "methods": [{"method": "downsample", "sweep": {"factor": [4]}}],
                "input_b64": base64.b64encode(scene_ppm).decode(),
            },
        )
        assert response.status_code == 422

    def test_compare_bad_base64(self, client):
        response = client.post(
            "/v1/compare",
            json={"methods": [{"method": "gaussian"}], "input_b64": "!!!",
                  "regions": {"near_figure": [0, 0, 8, 8]}},
        )
        assert response.status_code == 400

    def test_compare_extra_key_rejected(self, client):
        response = client.post("/v1/compare", json={"methods": [], "shenanigans": 1})
        assert response.status_code == 422


class TestBenchEndpoint:
    def test_bench_schema(self, client):
        response = client.post(
            "/v1/bench",
            json={"sizes": [128], "runs": 1,
                  "methods": [{"method": "downsample", "params": {"factor": 8}}]},
        )
        assert response.status_code == 200
        body = response.json()
        assert body["runs"] == 1
        assert body["results"][0]["method"] == "downsample"
        assert len(body["results"][0]["samples_ms"]) == 1
