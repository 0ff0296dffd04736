"""Method dispatch, parameter sweeps and the matched-anonymity comparison.

The comparison protocol: sweep each method's strength parameter, pick the
point whose near-region PSNR lands closest to the target (the "matched
anonymity" operating point), then read off how much of the far region each
method preserved at that point.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from itertools import product


import numpy as np

from . import metrics
from .baselines import (
    DownsampleParams,
    GaussianParams,
    SlicParams,
    downsample_anonymize,
    gaussian_blur,
    superpixel_anonymize,
)
from .dwt import get_basis
from .errors import ConfigError
from .frames import Frame, Region
from .scene import SceneParams, near_far_scene
from .wtaa import (
    ColorMode,
    WtaaConfig,
    anonymize_wtaa,
    default_policy,
    make_config,
    policy_from_dict,
)

METHODS = ("wtaa", "gaussian", "downsample", "superpixel")

_METHOD_PARAMS = {
    "wtaa": {"basis", "levels", "destroy_finest", "chroma_destroy", "color_mode", "policy"},
    "gaussian": {"sigma"},
    "downsample": {"factor"},
    "superpixel": {"segments", "compactness", "iterations"},
}

_REQUIRED_PARAMS = {
    "wtaa": set(),
    "gaussian": {"sigma"},
    "downsample": {"factor"},
    "superpixel": {"segments"},
}

DEFAULT_SWEEPS = {
    "wtaa": {"destroy_finest": [1, 2, 3, 4]},
    "gaussian": {"sigma": [1.0, 1.25, 1.5, 1.75, 2.0, 2.5, 3.0, 4.0]},
    "downsample": {"factor": [2, 4, 8, 16]},
    "superpixel": {"segments": [128, 256, 512, 1024]},
}


def validate_method_params(method: str, params: dict) -> None:
    if method not in _METHOD_PARAMS:
        raise ConfigError(f"unknown method {method!r}; expected one of {METHODS}")
    unknown = set(params) - _METHOD_PARAMS[method]
    if unknown:
        raise ConfigError(f"unknown parameter(s) {sorted(unknown)} for method {method!r}")
    missing = _REQUIRED_PARAMS[method] - set(params)
    if missing:
        raise ConfigError(f"method {method!r} needs parameter(s) {sorted(missing)}")


def apply_method(frame: Frame, method: str, params: dict) -> Frame:
    """Anonymize one frame with the named method; unknown parameters are rejected."""
    validate_method_params(method, params)
    if method == "wtaa":
        basis = get_basis(params.get("basis", "cdf97"))
        color_mode = ColorMode(params.get("color_mode", ColorMode.LUMA_CHROMA))
        if "policy" in params:
            # full explicit gains table; applies to every channel unless a
            # separate chroma depth is requested
            policy = policy_from_dict(params["policy"])
            chroma_policy = (
                default_policy(policy.levels, int(params["chroma_destroy"]))
                if "chroma_destroy" in params
                else policy
            )
            cfg = WtaaConfig(
                basis=basis, policy=policy, chroma_policy=chroma_policy, color_mode=color_mode
            )
        else:
            cfg = make_config(
                basis=basis,
                levels=int(params.get("levels", 4)),
                destroy_finest=int(params.get("destroy_finest", 2)),
                chroma_destroy=(
                    int(params["chroma_destroy"]) if "chroma_destroy" in params else None
                ),
                color_mode=color_mode,
            )
        return anonymize_wtaa(frame, cfg)
    if method == "gaussian":
        return gaussian_blur(frame, GaussianParams(float(params["sigma"])))
    if method == "downsample":
        return downsample_anonymize(frame, DownsampleParams(int(params["factor"])))
    return superpixel_anonymize(
        frame,
        SlicParams(
            segments=int(params["segments"]),
            compactness=float(params.get("compactness", 10.0)),
            iterations=int(params.get("iterations", 10)),
        ),
    )


@dataclass
class MethodSpec:
    method: str
    params: dict = field(default_factory=dict)
    sweep: dict[str, list] = field(default_factory=dict)

    def __post_init__(self):
        if self.method not in _METHOD_PARAMS:
            raise ConfigError(f"unknown method {self.method!r}; expected one of {METHODS}")
        if not self.sweep:
            self.sweep = {k: list(v) for k, v in DEFAULT_SWEEPS[self.method].items()}
        validate_method_params(self.method, {**self.params, **{k: None for k in self.sweep}})

    def points(self) -> list[dict]:
        keys = list(self.sweep.keys())
        out = []
        for combo in product(*(self.sweep[k] for k in keys)):
            point = dict(self.params)
            point.update(dict(zip(keys, combo)))
            out.append(point)
        return out


def mean_reports(reports: list[metrics.MetricsReport]) -> dict:
    dicts = [metrics.report_to_dict(r) for r in reports]
    out = {"global": {}, "regions": {}}
    for key in dicts[0]["global"]:
        out["global"][key] = round(float(np.mean([d["global"][key] for d in dicts])), 6)
    for name in dicts[0]["regions"]:
        out["regions"][name] = {}
        for key in dicts[0]["regions"][name]:
            values = [d["regions"][name].get(key) for d in dicts]
            if any(v is None for v in values):
                continue
            out["regions"][name][key] = round(float(np.mean(values)), 6)
    return out


def run_compare(
    originals: list[Frame],
    specs: list[MethodSpec],
    regions: dict[str, Region],
    target_psnr: float = 20.0,
    tolerance: float = 1.0,
    match_region: str = "near_figure",
) -> dict:
    """Sweep every method, report metrics per parameter point, and mark the
    matched-anonymity point (near-region PSNR closest to the target)."""
    if len(specs) < 1:
        raise ConfigError("compare needs at least one method spec")
    if match_region not in regions:
        raise ConfigError(f"match region {match_region!r} not among regions {sorted(regions)}")
    report: dict = {
        "target": {
            "region": match_region,
            "psnr_db": target_psnr,
            "tolerance_db": tolerance,
        },
        "frames": len(originals),
        "methods": [],
    }
    for spec in specs:
        entries = []
        for point in spec.points():
            frame_reports = [
                metrics.compute_report(orig, apply_method(orig, spec.method, point), regions)
                for orig in originals
            ]
            entries.append({"params": point, "metrics": mean_reports(frame_reports)})
        matched = min(
            range(len(entries)),
            key=lambda i: abs(
                entries[i]["metrics"]["regions"][match_region]["psnr_db"] - target_psnr
            ),
        )
        match_psnr = entries[matched]["metrics"]["regions"][match_region]["psnr_db"]
        report["methods"].append(
            {
                "method": spec.method,
                "points": entries,
                "matched": {
                    "params": entries[matched]["params"],
                    "metrics": entries[matched]["metrics"],
                    "match_psnr_db": match_psnr,
                    "within_tolerance": bool(abs(match_psnr - target_psnr) <= tolerance),
                },
            }
        )
    return report


def run_bench(
    sizes: list[int],
    specs: list[tuple[str, dict]],
    runs: int = 5,
) -> dict:
    """Time each method over the synthetic scene at each size; medians and p95 in ms."""
    if runs < 1:
        raise ConfigError("bench needs at least one run")
    results = []
    for size in sizes:
        frame, _ = near_far_scene(SceneParams(width=size, height=size))
        for method, params in specs:
            validate_method_params(method, params)
            apply_method(frame, method, params)  # warm-up, excluded from samples
            samples = []
            for _ in range(runs):
                start = time.perf_counter()
                apply_method(frame, method, params)
                samples.append((time.perf_counter() - start) * 1000.0)
            results.append(
                {
                    "method": method,
                    "params": params,
                    "width": size,
                    "height": size,
                    "per_frame_ms": {
                        "median": round(float(np.median(samples)), 3),
                        "p95": round(float(np.percentile(samples, 95)), 3),
                    },
                    "samples_ms": [round(s, 3) for s in samples],
                }
            )
    return {"runs": runs, "results": results}
