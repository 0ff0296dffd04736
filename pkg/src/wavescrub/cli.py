"""Command line interface: anonymize | compare | synth | bench | serve.

Exit codes: 0 success, 1 usage or configuration error, 2 input parse error,
3 processing error. `-` stands for stdin/stdout.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional

from . import compare as compare_mod
from . import metrics, video_io
from .dwt import decompose_plane, get_basis, serialize_pyramid
from .errors import ConfigError, VideoIoError, WavescrubError
from .frames import Frame, Region
from .pipeline import ordered_parallel_map
from .scene import SceneParams, near_far_scene, regions_from_dict, regions_to_dict
from .video_io import VideoStreamHeader

__version__ = "0.1.0"


class UsageError(WavescrubError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# --- config / regions loading -----------------------------------------------------


def _load_json_arg(value: str) -> dict:
    """Accept inline JSON (starts with '{') or a path to a JSON file."""
    if value.lstrip().startswith("{"):
        text = value
    else:
        try:
            text = Path(value).read_text()
        except OSError as exc:
            raise UsageError(f"cannot read JSON file {value!r}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"invalid JSON in {value!r}: {exc}") from exc
    if not isinstance(data, dict):
        raise UsageError("top-level JSON value must be an object")
    return data


def _merge_config(args: argparse.Namespace, allowed: set[str]) -> None:
    """Fold --config values into unset CLI arguments, rejecting unknown keys."""
    if not getattr(args, "config", None):
        return
    data = _load_json_arg(args.config)
    unknown = set(data) - allowed
    if unknown:
        raise UsageError(f"unknown config key(s): {sorted(unknown)}")
    for key, value in data.items():
        attr = key.replace("-", "_")
        if getattr(args, attr, None) is None:
            setattr(args, attr, value)


def _load_regions(value: Optional[str]) -> Optional[dict[str, Region]]:
    if value is None:
        return None
    return regions_from_dict(_load_json_arg(value))


# --- frame I/O ----------------------------------------------------------------------


def _detect_format(path: str, explicit: str, for_input: bool) -> str:
    if explicit != "auto":
        return explicit
    if path == "-":
        return "y4m"  # stdin sniffing happens in _read_frames
    p = Path(path)
    if p.suffix.lower() == ".y4m":
        return "y4m"
    if p.suffix.lower() == ".ppm" or (for_input and p.is_dir()) or (not for_input and not p.suffix):
        return "ppm-seq"
    raise UsageError(f"cannot infer format of {path!r}; pass --format")


def _read_ppm_concat(data: bytes) -> list[Frame]:
    frames = []
    offset = 0
    while offset < len(data):
        frame, consumed = video_io.read_ppm_at(data, offset)
        frames.append(frame)
        offset = consumed
    return frames


def _read_frames(path: str, fmt: str) -> tuple[list[Frame], Optional[VideoStreamHeader]]:
    if path == "-":
        data = sys.stdin.buffer.read()
        is_y4m = fmt == "y4m" or (fmt == "auto" and data[:9] == b"YUV4MPEG2")
        if is_y4m:
            header, frames = video_io.read_y4m_bytes(data)
            return frames, header
        return _read_ppm_concat(data), None
    fmt = _detect_format(path, fmt, for_input=True)
    p = Path(path)
    try:
        if fmt == "y4m":
            with open(p, "rb") as fh:
                seq = video_io.read_y4m(fh)
                return list(seq), seq.header
        if p.is_dir():
            files = sorted(p.glob("*.ppm"))
            if not files:
                raise VideoIoError(f"no .ppm files in directory {path!r}")
            return [video_io.read_ppm(f.read_bytes()) for f in files], None
        return _read_ppm_concat(p.read_bytes()), None
    except OSError as exc:
        raise VideoIoError(f"cannot read {path!r}: {exc}") from exc


def _write_frames(
    path: str,
    frames: list[Frame],
    header: Optional[VideoStreamHeader],
    fmt: str,
) -> None:
    if header is not None and (fmt in ("auto", "y4m") or path == "-"):
        payload = video_io.write_y4m_bytes(header, frames)
        if path == "-":
            sys.stdout.buffer.write(payload)
        else:
            Path(path).write_bytes(payload)
        return
    blobs = [video_io.write_ppm(f) for f in frames]
    if path == "-":
        for blob in blobs:
            sys.stdout.buffer.write(blob)
        return
    p = Path(path)
    if p.suffix.lower() == ".ppm":
        if len(blobs) == 1:
            p.write_bytes(blobs[0])
        else:
            p.write_bytes(b"".join(blobs))
        return
    p.mkdir(parents=True, exist_ok=True)
    for i, blob in enumerate(blobs):
        (p / f"frame_{i:06d}.ppm").write_bytes(blob)


def _write_report(path: Optional[str], payload: dict) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


# --- subcommands -------------------------------------------------------------------


_ANON_CONFIG_KEYS = {
    "input", "output", "format", "method", "basis", "levels", "destroy_finest",
    "chroma_destroy", "sigma", "factor", "segments", "compactness", "iterations",
    "policy", "regions", "report", "threads", "dump_pyramid",
}


def _method_params(args: argparse.Namespace) -> dict:
    params: dict = {}
    if args.method == "wtaa":
        # "policy" (an explicit gains table) arrives via --config JSON only
        for key in ("basis", "levels", "destroy_finest", "chroma_destroy", "policy"):
            value = getattr(args, key, None)
            if value is not None:
                params[key] = value
    elif args.method == "gaussian":
        if args.sigma is None:
            raise UsageError("gaussian method needs --sigma")
        params["sigma"] = args.sigma
    elif args.method == "downsample":
        if args.factor is None:
            raise UsageError("downsample method needs --factor")
        params["factor"] = args.factor
    elif args.method == "superpixel":
        if args.segments is None:
            raise UsageError("superpixel method needs --segments")
        params["segments"] = args.segments
        if args.compactness is not None:
            params["compactness"] = args.compactness
        if args.iterations is not None:
            params["iterations"] = args.iterations
    else:
        raise UsageError(f"unknown method {args.method!r}")
    return params


def cmd_anonymize(args: argparse.Namespace) -> int:
    _merge_config(args, _ANON_CONFIG_KEYS)
    if args.input is None or args.output is None or args.method is None:
        raise UsageError("anonymize needs --input, --output and --method")
    params = _method_params(args)
    compare_mod.validate_method_params(args.method, params)
    frames, header = _read_frames(args.input, args.format)
    threads = args.threads or 1

    if args.dump_pyramid and args.method == "wtaa" and frames:
        basis = get_basis(params.get("basis", "cdf97"))
        pyramid = decompose_plane(frames[0].planes[0], basis, int(params.get("levels", 4)))
        Path(args.dump_pyramid).write_bytes(serialize_pyramid(pyramid))

    processed = list(
        ordered_parallel_map(frames, lambda f: compare_mod.apply_method(f, args.method, params), threads)
    )
    _write_frames(args.output, processed, header, args.format)

    if args.report is not None:
        regions = _load_regions(args.regions) or {}
        reports = [
            metrics.compute_report(orig, anon, regions)
            for orig, anon in zip(frames, processed)
        ]
        payload = compare_mod.mean_reports(reports)
        payload["frames"] = len(frames)
        payload["method"] = args.method
        payload["params"] = params
        _write_report(args.report, payload)
    return 0


_COMPARE_CONFIG_KEYS = {
    "input", "format", "methods", "regions", "report", "target_psnr",
    "tolerance", "match_region", "threads",
}


def cmd_compare(args: argparse.Namespace) -> int:
    _merge_config(args, _COMPARE_CONFIG_KEYS)
    if not args.methods:
        raise UsageError("compare needs a config with a 'methods' list")
    specs = []
    for entry in args.methods:
        if not isinstance(entry, dict) or "method" not in entry:
            raise UsageError("each methods[] entry must be an object with a 'method' key")
        unknown = set(entry) - {"method", "params", "sweep"}
        if unknown:
            raise UsageError(f"unknown methods[] key(s): {sorted(unknown)}")
        specs.append(
            compare_mod.MethodSpec(
                method=entry["method"],
                params=dict(entry.get("params", {})),
                sweep={k: list(v) for k, v in entry.get("sweep", {}).items()},
            )
        )
    if args.input is None:
        frame, regions = near_far_scene()
        frames = [frame]
    else:
        frames, _ = _read_frames(args.input, args.format)
        regions = _load_regions(args.regions)
        if regions is None:
            raise UsageError("compare on real input needs --regions")
    region_override = _load_regions(args.regions)
    if region_override is not None:
        regions = region_override
    report = compare_mod.run_compare(
        frames,
        specs,
        regions,
        target_psnr=args.target_psnr if args.target_psnr is not None else 20.0,
        tolerance=args.tolerance if args.tolerance is not None else 1.0,
        match_region=args.match_region or "near_figure",
    )
    _write_report(args.report, report)
    return 0


def cmd_synth(args: argparse.Namespace) -> int:
    if args.kind != "near-far-scene":
        raise UsageError(f"unknown synth kind {args.kind!r}")
    frame, regions = near_far_scene(SceneParams(width=args.width, height=args.height))
    frames = [frame] * args.frames
    _write_frames(args.output, frames, None, "ppm-seq")
    if args.regions_out:
        _write_report(args.regions_out, regions_to_dict(regions))
    return 0


def cmd_bench(args: argparse.Namespace) -> int:
    sizes = [int(s) for s in args.sizes.split(",")] if args.sizes else [256]
    specs = []
    for name in (args.methods or "wtaa,gaussian,downsample,superpixel").split(","):
        name = name.strip()
        params = {"basis": "haar", "levels": 4, "destroy_finest": 2} if name == "wtaa" else {}
        if name == "gaussian":
            params = {"sigma": 2.0}
        elif name == "downsample":
            params = {"factor": 8}
        elif name == "superpixel":
            params = {"segments": 128}
        specs.append((name, params))
    report = compare_mod.run_bench(sizes, specs, runs=args.runs)
    _write_report(args.report, report)
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service.app import app

    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


# --- argument wiring -------------------------------------------------------------


def build_parser() -> _Parser:
    parser = _Parser(prog="wavescrub", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    anon = sub.add_parser("anonymize", help="anonymize a PPM sequence or Y4M stream")
    anon.add_argument("--input", "-i")
    anon.add_argument("--output", "-o")
    anon.add_argument("--format", choices=["auto", "ppm-seq", "y4m"], default="auto")
    anon.add_argument("--method", choices=list(compare_mod.METHODS))
    anon.add_argument("--basis", choices=["haar", "db4", "cdf97"])
    anon.add_argument("--levels", type=int)
    anon.add_argument("--destroy-finest", type=int, dest="destroy_finest")
    anon.add_argument("--chroma-destroy", type=int, dest="chroma_destroy")
    anon.add_argument("--sigma", type=float)
    anon.add_argument("--factor", type=int)
    anon.add_argument("--segments", type=int)
    anon.add_argument("--compactness", type=float)
    anon.add_argument("--iterations", type=int)
    anon.add_argument("--regions", help="named regions JSON (inline or path)")
    anon.add_argument("--report", help="write a metrics report JSON here ('-' = stdout)")
    anon.add_argument("--threads", type=int)
    anon.add_argument("--config", help="JSON config (inline or path); flags win")
    anon.add_argument("--dump-pyramid", dest="dump_pyramid", help="debug WPYR dump of frame 0")
    anon.set_defaults(func=cmd_anonymize)

    comp = sub.add_parser("compare", help="sweep methods and report matched-anonymity metrics")
    comp.add_argument("--input", "-i", help="omit to compare on the synthetic scene")
    comp.add_argument("--format", choices=["auto", "ppm-seq", "y4m"], default="auto")
    comp.add_argument("--config", help="JSON config with a methods list")
    comp.add_argument("--regions")
    comp.add_argument("--report", help="output JSON path ('-' = stdout)")
    comp.add_argument("--target-psnr", type=float, dest="target_psnr")
    comp.add_argument("--tolerance", type=float)
    comp.add_argument("--match-region", dest="match_region")
    comp.add_argument("--threads", type=int)
    comp.set_defaults(func=cmd_compare, methods=None)

    synth = sub.add_parser("synth", help="generate the deterministic near/far test scene")
    synth.add_argument("kind", nargs="?", default="near-far-scene")
    synth.add_argument("--output", "-o", required=True)
    synth.add_argument("--width", type=int, default=256)
    synth.add_argument("--height", type=int, default=256)
    synth.add_argument("--frames", type=int, default=1)
    synth.add_argument("--regions-out", dest="regions_out", help="write regions JSON here")
    synth.set_defaults(func=cmd_synth)

    bench = sub.add_parser("bench", help="time methods over generated frames")
    bench.add_argument("--sizes", help="comma-separated square sizes (default 256)")
    bench.add_argument("--methods", help="comma-separated method names")
    bench.add_argument("--runs", type=int, default=5)
    bench.add_argument("--report", help="output JSON path ('-' = stdout)")
    bench.set_defaults(func=cmd_bench)

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.set_defaults(func=cmd_serve)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except (UsageError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except VideoIoError as exc:
        print(f"input error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except WavescrubError as exc:
        print(f"processing error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"processing error: {exc}", file=sys.stderr)
        return 3


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
