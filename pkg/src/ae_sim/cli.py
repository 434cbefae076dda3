"""Command-line entry point.

Subcommands: synth (render a scene script to a dataset directory), run
(simulate an AE algorithm over a dataset), compare-scales, saliency (debug
map for one PNG), serve (HTTP service). Errors print one JSON object to
stderr and exit nonzero.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

import cv2
import numpy as np

from .algorithms import ALGORITHMS, AEConfig
from .dataset import load_dataset, save_dataset
from .errors import AESimError, InvalidArgumentError
from .exposure import build_ladder
from .isp import IspProfile
from .saliency import SaliencyConfig, mbd_saliency
from .scene import SceneScript, synthesize_scene
from .scenes import DEFAULT_T_MAX, DEFAULT_T_MIN, bundled_scene_scripts, default_ladder
from .simulate import compare_scales, export_frames, export_trace, run


def _load_script(ref: str) -> SceneScript:
    path = Path(ref)
    if path.is_file():
        return SceneScript.from_dict(json.loads(path.read_text()))
    bundled = bundled_scene_scripts()
    if ref in bundled:
        return bundled[ref]
    raise InvalidArgumentError(
        f"{ref!r} is neither a script file nor a bundled scene ({', '.join(sorted(bundled))})",
        field="script",
    )


def _config_from_args(args) -> AEConfig:
    return AEConfig(
        key_raw=args.key,
        clip_threshold=args.clip_threshold,
        retain_fraction=args.retain_fraction,
        saliency=SaliencyConfig(args.gamma, args.beta),
        smoothing_window=args.smooth_window,
        start_index=args.start_index,
    )


def cmd_synth(args) -> int:
    script = _load_script(args.script)
    overrides = {}
    if args.width or args.height:
        overrides["width"] = args.width or script.width
        overrides["height"] = args.height or script.height
    if args.seed is not None:
        overrides["seed"] = args.seed
    if overrides:
        script = dataclasses.replace(script, **overrides)
    levels = args.levels or default_ladder().n_levels
    ladder = build_ladder(DEFAULT_T_MIN, DEFAULT_T_MAX, levels)
    seq = synthesize_scene(script, ladder)
    manifest = save_dataset(seq, args.out)
    print(json.dumps({
        "scene_id": manifest.scene_id,
        "out": str(Path(args.out)),
        "n_timesteps": manifest.n_timesteps,
        "n_levels": len(manifest.ladder_speeds),
        "frames": len(manifest.frames),
    }))
    return 0


def cmd_run(args) -> int:
    seq = load_dataset(args.scene)
    config = _config_from_args(args)
    trace = run(seq, args.algo, config, args.scale, args.per_frame_optimal)
    out = Path(args.out)
    trace_path = export_trace(trace, out / "trace.json", "json")
    export_trace(trace, out / "trace.csv", "csv")
    if args.frames:
        export_frames(seq, trace, IspProfile(key_raw=args.key), out / "frames", fps=args.fps)
    print(json.dumps({
        "trace": str(trace_path),
        "config_hash": trace.config_hash,
        "mean_index": float(np.mean(trace.indices())),
    }))
    return 0


def cmd_compare_scales(args) -> int:
    seq = load_dataset(args.scene)
    config = _config_from_args(args)
    scales = [int(s) for s in args.scales.split(",")]
    comparison = compare_scales(seq, args.algo, config, scales)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "comparison.json").write_text(json.dumps(comparison.to_dict(), indent=1))
    print(json.dumps({
        "reference_scale": comparison.reference_scale,
        "mean_abs_ev_diff": {
            str(e.scale): e.mean_abs_ev_diff for e in comparison.entries
        },
    }))
    return 0


def cmd_saliency(args) -> int:
    bgr = cv2.imread(args.infile, cv2.IMREAD_COLOR)
    if bgr is None:
        raise InvalidArgumentError(f"cannot read image {args.infile}", field="in")
    smap = mbd_saliency(bgr[:, :, ::-1].astype(np.uint8), SaliencyConfig(args.gamma, args.beta))
    out = np.where(smap > args.gamma, 255, 0) if args.binary else np.rint(smap * 255.0)
    cv2.imwrite(args.outfile, out.astype(np.uint8))
    print(json.dumps({"out": args.outfile, "salient_fraction": float((smap > args.gamma).mean())}))
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(args.data), host=args.host, port=args.port)
    return 0


def _add_ae_params(p: argparse.ArgumentParser):
    p.add_argument("--key", type=float, default=0.13)
    p.add_argument("--clip-threshold", type=float, default=0.9)
    p.add_argument("--retain-fraction", type=float, default=0.01)
    p.add_argument("--gamma", type=float, default=0.1)
    p.add_argument("--beta", type=float, default=14.0)
    p.add_argument("--smooth-window", type=int, default=4)
    p.add_argument("--start-index", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ae-sim", description="Autoexposure simulation toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="render a scene script into a dataset directory")
    p.add_argument("--script", required=True, help="scene script JSON file or bundled scene id")
    p.add_argument("--out", required=True)
    p.add_argument("--width", type=int)
    p.add_argument("--height", type=int)
    p.add_argument("--levels", type=int)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("run", help="simulate an AE algorithm over a dataset")
    p.add_argument("--scene", required=True, help="dataset directory")
    p.add_argument("--algo", required=True, choices=sorted(ALGORITHMS))
    _add_ae_params(p)
    p.add_argument("--scale", type=int, default=1)
    p.add_argument("--per-frame-optimal", action="store_true",
                   help="per-frame stack search for the mean closest to the key instead of the feedback law")
    p.add_argument("--frames", action="store_true", help="also export chosen sRGB frames")
    p.add_argument("--fps", type=int, default=10)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("compare-scales", help="compare one algorithm across subsampling scales")
    p.add_argument("--scene", required=True)
    p.add_argument("--algo", required=True, choices=sorted(ALGORITHMS))
    _add_ae_params(p)
    p.add_argument("--scales", default="1,8", help="comma-separated factors; first is the reference")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_compare_scales)

    p = sub.add_parser("saliency", help="write the saliency map of a PNG (debugging)")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", dest="outfile", required=True)
    p.add_argument("--gamma", type=float, default=0.1)
    p.add_argument("--beta", type=float, default=14.0)
    p.add_argument("--binary", action="store_true")
    p.set_defaults(func=cmd_saliency)

    p = sub.add_parser("serve", help="start the HTTP service")
    p.add_argument("--data", help="dataset root (default: AE_SIM_DATA env var)")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except AESimError as exc:
        print(json.dumps(exc.as_dict()), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
