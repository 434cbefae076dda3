"""HTTP facade over datasets, simulations, frames, histograms and saliency
maps. Read-only over the dataset root; runs execute synchronously and are
cached under content-addressed trace ids."""
from __future__ import annotations

import hashlib
import json
import os
from collections import OrderedDict
from pathlib import Path

import cv2
import numpy as np
from fastapi import FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from . import algorithms, simulate
from .dataset import MANIFEST_NAME, load_dataset
from .errors import AESimError
from .histogram import SRGB_BINS, WeightedHistogram, build_histogram, clip_saturated, weighted_mean
from .image import srgb_luminance
from .isp import IspProfile, raw_to_srgb
from .saliency import SaliencyConfig, mbd_saliency

DATA_ENV_VAR = "AE_SIM_DATA"
TRACE_CACHE_SIZE = 128


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str, field: str = None):
        super().__init__(message)
        self.status = status
        self.body = {"code": code, "message": message, "field": field}


class RunRequest(BaseModel):
    scene_id: str
    algorithm: str
    key_raw: float = 0.13
    clip_threshold: float = 0.9
    retain_fraction: float = 0.01
    clip_mode: str = "absolute"
    gamma_threshold: float = 0.1
    beta_weight: float = 14.0
    n_passes: int = 3
    smoothing_window: int = 4
    start_index: int = 0
    scale: int = 1
    per_frame_optimal: bool = False


def _png(array: np.ndarray) -> bytes:
    bgr = array[:, :, ::-1] if array.ndim == 3 else array
    ok, buf = cv2.imencode(".png", bgr)
    if not ok:
        raise ApiError(500, "encode-failed", "PNG encoding failed")
    return buf.tobytes()


class SceneStore:
    """Lazily loaded, mtime-invalidated view of the dataset root."""

    def __init__(self, root: Path | None):
        self.root = root
        self._cache = {}

    def scan(self):
        if self.root is None or not self.root.is_dir():
            raise ApiError(503, "dataset-unavailable",
                           f"dataset root {self.root} is not a directory", field="data_root")
        scenes, warnings = {}, []
        for entry in sorted(self.root.iterdir()):
            manifest = entry / MANIFEST_NAME
            if not manifest.is_file():
                continue
            try:
                scenes[entry.name] = self._load(entry, manifest)
            except AESimError as exc:
                warnings.append({"scene_dir": entry.name, **exc.as_dict()})
        return scenes, warnings

    def _load(self, entry: Path, manifest: Path):
        stamp = (manifest.stat().st_mtime_ns, manifest.stat().st_size)
        cached = self._cache.get(entry.name)
        if cached is None or cached[0] != stamp:
            self._cache[entry.name] = (stamp, load_dataset(entry))
        return self._cache[entry.name][1]

    def get(self, scene_id: str):
        scenes, _ = self.scan()
        for seq in scenes.values():
            if seq.scene_id == scene_id:
                return seq
        if scene_id in scenes:
            return scenes[scene_id]
        raise ApiError(404, "unknown-scene", f"no scene {scene_id!r} under {self.root}", field="scene_id")


def create_app(data_root=None) -> FastAPI:
    root = data_root if data_root is not None else os.environ.get(DATA_ENV_VAR)
    store = SceneStore(Path(root) if root else None)
    traces = OrderedDict()
    app = FastAPI(title="ae-sim service")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"],
    )

    @app.exception_handler(ApiError)
    async def _api_error(_request: Request, exc: ApiError):
        return JSONResponse(exc.body, status_code=exc.status)

    @app.exception_handler(AESimError)
    async def _sim_error(_request: Request, exc: AESimError):
        return JSONResponse({"code": exc.code, "message": exc.message, "field": exc.field}, status_code=422)

    @app.exception_handler(RequestValidationError)
    async def _validation_error(_request: Request, exc: RequestValidationError):
        first = exc.errors()[0] if exc.errors() else {}
        field = ".".join(str(p) for p in first.get("loc", ())[1:]) or None
        return JSONResponse(
            {"code": "invalid-request", "message": first.get("msg", "invalid request"), "field": field},
            status_code=422,
        )

    def scene_or_404(scene_id: str):
        return store.get(scene_id)

    def frame_or_422(seq, t: int, index: int):
        if not 0 <= t < seq.n_timesteps:
            raise ApiError(422, "out-of-range", f"t must be in 0..{seq.n_timesteps - 1}", field="t")
        if not 0 <= index < seq.ladder.n_levels:
            raise ApiError(422, "out-of-range", f"index must be in 0..{seq.ladder.n_levels - 1}", field="index")
        return seq.frame(t, index)

    @app.get("/scenes")
    def list_scenes():
        scenes, warnings = store.scan()
        summaries = [
            {
                "scene_id": seq.scene_id,
                "width": seq.width,
                "height": seq.height,
                "n_timesteps": seq.n_timesteps,
                "n_levels": seq.ladder.n_levels,
                "ladder_speeds": [float(s) for s in seq.ladder.speeds],
                "attributes": seq.attributes,
                "has_boxes": seq.has_boxes,
            }
            for seq in scenes.values()
        ]
        return {"scenes": summaries, "warnings": warnings}

    @app.get("/scenes/{scene_id}/frame")
    def get_frame(scene_id: str, t: int, index: int, space: str = "srgb8", key: float = 0.13):
        seq = scene_or_404(scene_id)
        if space not in ("raw16", "srgb8"):
            raise ApiError(422, "invalid-argument", "space must be raw16 or srgb8", field="space")
        frame = frame_or_422(seq, t, index)
        if space == "raw16":
            path = seq.frame_path(t, index) if hasattr(seq, "frame_path") else None
            if path is not None:
                return Response(path.read_bytes(), media_type="image/png")
            return Response(_png(frame.codes()), media_type="image/png")
        return Response(_png(raw_to_srgb(frame, IspProfile(key_raw=key))), media_type="image/png")

    @app.get("/scenes/{scene_id}/histogram")
    def get_histogram(scene_id: str, t: int, index: int, space: str = "raw16", algo: str = "global",
                      key: float = 0.13, clip_threshold: float = 0.9, retain_fraction: float = 0.01,
                      clip_mode: str = "absolute", gamma_threshold: float = 0.1, beta_weight: float = 14.0):
        seq = scene_or_404(scene_id)
        if space not in ("raw16", "srgb8"):
            raise ApiError(422, "invalid-argument", "space must be raw16 or srgb8", field="space")
        if algo not in ("global", "semantic", "saliency"):
            raise ApiError(422, "invalid-argument",
                           "histogram algo must be one of global, semantic, saliency", field="algo")
        frame = frame_or_422(seq, t, index)
        h, w = frame.height, frame.width
        profile = IspProfile(key_raw=key)
        if algo == "semantic":
            box = seq.box(t)
            if box is None:
                raise ApiError(422, "invalid-argument",
                               f"scene {scene_id!r} has no bounding box at t={t}", field="algo")
            wmap = box.mask(h, w).astype(np.float64)
        elif algo == "saliency":
            config = SaliencyConfig(gamma_threshold=gamma_threshold, beta_weight=beta_weight)
            mask = mbd_saliency(raw_to_srgb(frame, profile), config) > gamma_threshold
            wmap = np.where(mask, beta_weight, 1.0)
        else:
            wmap = np.ones((h, w))
        wmap = clip_saturated(frame, wmap, clip_threshold, retain_fraction, clip_mode)
        if space == "raw16":
            hist = build_histogram(frame, wmap)
        else:
            lum = srgb_luminance(raw_to_srgb(frame, profile)) / 255.0
            hist = WeightedHistogram(np.bincount(
                np.minimum((lum * SRGB_BINS).astype(int), SRGB_BINS - 1).ravel(),
                weights=wmap.ravel(), minlength=SRGB_BINS))
        return {
            "space": space,
            "algo": algo,
            "bins": hist.n_bins,
            "bin_centers": hist.centers.tolist(),
            "weights": hist.bin_weights.tolist(),
            "mean": weighted_mean(hist),
            "key": key,
        }

    @app.get("/scenes/{scene_id}/saliency")
    def get_saliency(scene_id: str, t: int, index: int, binary: float = None, key: float = 0.13,
                     gamma_threshold: float = 0.1, beta_weight: float = 14.0, n_passes: int = 3):
        seq = scene_or_404(scene_id)
        frame = frame_or_422(seq, t, index)
        config = SaliencyConfig(gamma_threshold=gamma_threshold, beta_weight=beta_weight, n_passes=n_passes)
        smap = mbd_saliency(raw_to_srgb(frame, IspProfile(key_raw=key)), config)
        if binary is not None:
            out = np.where(smap > binary, 255, 0).astype(np.uint8)
        else:
            out = np.rint(smap * 255.0).astype(np.uint8)
        return Response(_png(out), media_type="image/png")

    @app.post("/runs")
    def post_run(req: RunRequest):
        seq = scene_or_404(req.scene_id)
        if req.algorithm not in algorithms.ALGORITHMS:
            raise ApiError(422, "unknown-algorithm",
                           f"unknown algorithm {req.algorithm!r}; registered: "
                           f"{', '.join(sorted(algorithms.ALGORITHMS))}", field="algorithm")
        try:
            config = algorithms.AEConfig(
                key_raw=req.key_raw,
                clip_threshold=req.clip_threshold,
                retain_fraction=req.retain_fraction,
                clip_mode=req.clip_mode,
                saliency=SaliencyConfig(req.gamma_threshold, req.beta_weight, req.n_passes),
                smoothing_window=req.smoothing_window,
                start_index=req.start_index,
            )
        except AESimError as exc:
            raise ApiError(422, exc.code, exc.message, exc.field)
        dataset_version = getattr(seq, "manifest_hash", "in-memory")
        payload = json.dumps({**req.model_dump(), "dataset": dataset_version}, sort_keys=True)
        trace_id = hashlib.sha256(payload.encode()).hexdigest()[:24]
        if trace_id not in traces:
            trace = simulate.run(seq, req.algorithm, config, req.scale, req.per_frame_optimal)
            traces[trace_id] = trace.to_dict()
            while len(traces) > TRACE_CACHE_SIZE:
                traces.popitem(last=False)
        return {"trace_id": trace_id, "trace": traces[trace_id]}

    @app.get("/runs/{trace_id}")
    def get_run(trace_id: str):
        if trace_id not in traces:
            raise ApiError(404, "unknown-trace", f"no trace {trace_id!r} in cache", field="trace_id")
        return traces[trace_id]

    return app
