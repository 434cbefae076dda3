"""Closed-loop simulation of AE controllers over a scene, scale comparison,
and trace / frame export."""
from __future__ import annotations

import csv
import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import cv2
import numpy as np

from .algorithms import ALGORITHMS, AEConfig, AEState, smooth_index, step
from .errors import DatasetError, InvalidArgumentError, UnknownAlgorithmError
from .exposure import ExposureStack
from .histogram import build_histogram, clip_saturated, entropy, weighted_mean
from .image import subsample
from .isp import IspProfile, raw_to_srgb
from .saliency import mbd_saliency, threshold_map, weights_from_saliency
from .scene import SceneSequence

TRACE_CSV_COLUMNS = (
    "t", "raw_target_index", "smoothed_index", "shutter_seconds",
    "histogram_mean", "entropy", "saturated_pixels", "retained_pixels",
)


@dataclass
class TraceStep:
    t: int
    raw_target_index: int
    smoothed_index: int
    shutter_seconds: float
    histogram_mean: float  # None for entropy metering
    entropy: float  # entropy of the chosen frame at the metering scale
    saturated_pixels: int = 0
    retained_pixels: int = 0

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in TRACE_CSV_COLUMNS}

    @classmethod
    def from_dict(cls, d: dict) -> "TraceStep":
        return cls(**{k: d[k] for k in TRACE_CSV_COLUMNS})


@dataclass
class SimulationTrace:
    scene_id: str
    algorithm: str
    scale: int
    config: dict
    config_hash: str
    ladder_speeds: list
    oracle: bool = False
    per_frame_optimal: bool = False
    steps: list = field(default_factory=list)

    def __len__(self):
        return len(self.steps)

    def indices(self) -> np.ndarray:
        return np.array([s.smoothed_index for s in self.steps])

    def shutters(self) -> np.ndarray:
        return np.array([s.shutter_seconds for s in self.steps])

    def to_dict(self) -> dict:
        return {
            "scene_id": self.scene_id,
            "algorithm": self.algorithm,
            "scale": self.scale,
            "config": self.config,
            "config_hash": self.config_hash,
            "ladder_speeds": self.ladder_speeds,
            "oracle": self.oracle,
            "per_frame_optimal": self.per_frame_optimal,
            "steps": [s.to_dict() for s in self.steps],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SimulationTrace":
        return cls(
            scene_id=d["scene_id"],
            algorithm=d["algorithm"],
            scale=d["scale"],
            config=d["config"],
            config_hash=d["config_hash"],
            ladder_speeds=d["ladder_speeds"],
            oracle=d.get("oracle", False),
            per_frame_optimal=d.get("per_frame_optimal", False),
            steps=[TraceStep.from_dict(s) for s in d["steps"]],
        )


def config_hash(config: AEConfig) -> str:
    payload = json.dumps(config.to_dict(), sort_keys=True)
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


def _scaled_stack(scene: SceneSequence, t: int, scale: int) -> ExposureStack:
    stack = scene.stack(t)
    if scale == 1:
        return stack
    return ExposureStack(stack.ladder, [subsample(img, scale) for img in stack.images], stack.captured_mask)


def _metering_weights(kind: str, frame, box, state, config: AEConfig) -> np.ndarray:
    h, w = frame.pixels.shape[:2]
    if kind == "semantic":
        return box.mask(h, w).astype(np.float64)
    if kind == "saliency" and state.prev_srgb is not None:
        mask = threshold_map(mbd_saliency(state.prev_srgb, config.saliency), config.saliency.gamma_threshold)
        return weights_from_saliency(mask, config.saliency.beta_weight)
    return np.ones((h, w))


def _optimal_step(kind: str, scene: SceneSequence, t: int, scale: int, box, state,
                  config: AEConfig, profile: IspProfile):
    """Per-frame stack search: the level whose modified histogram mean lands
    closest to the key (ties to the lower index), then smoothing."""
    from .algorithms import AEDecision

    stack = _scaled_stack(scene, t, scale)
    weights_frame = stack.images[state.current_index]
    wmap = _metering_weights(kind, weights_frame, box, state, config)
    best, best_mean, best_dist = 0, None, math.inf
    for i, img in enumerate(stack.images):
        clipped = clip_saturated(img, wmap, config.clip_threshold, config.retain_fraction, config.clip_mode)
        mean = weighted_mean(build_histogram(img, clipped, config.raw_bins))
        dist = abs(mean - config.key_raw)
        if dist < best_dist:
            best, best_mean, best_dist = i, mean, dist
    decision = AEDecision(raw_target_index=best, histogram_mean=best_mean, scale_applied=None)
    decision.smoothed_index = smooth_index(best, state)
    if kind == "saliency":
        state.prev_srgb = raw_to_srgb(stack.images[decision.smoothed_index], profile)
    state.current_index = decision.smoothed_index
    return decision


def run(scene: SceneSequence, algorithm: str, config: AEConfig = None, scale: int = 1,
        per_frame_optimal: bool = False) -> SimulationTrace:
    """Simulate one AE algorithm over a scene at the given subsampling scale.

    Deterministic: identical (scene, algorithm, config, scale) inputs yield
    identical traces. The entropy algorithm consumes the full stack at each
    step (disclosed via the trace's oracle flag); the others meter the single
    frame at the controller's current index.
    """
    config = config or AEConfig()
    if algorithm not in ALGORITHMS:
        raise UnknownAlgorithmError(
            f"unknown algorithm {algorithm!r}; registered: {', '.join(sorted(ALGORITHMS))}",
            field="algorithm",
        )
    info = ALGORITHMS[algorithm]
    if not isinstance(scale, (int, np.integer)) or scale < 1:
        raise InvalidArgumentError(f"scale must be an integer >= 1, got {scale}", field="scale")
    if info.needs_box and not scene.has_boxes:
        raise InvalidArgumentError(
            f"scene {scene.scene_id!r} has no bounding boxes; semantic metering unavailable", field="box"
        )
    state = AEState.initial(config, scene.ladder)
    profile = config.isp_profile()
    trace = SimulationTrace(
        scene_id=scene.scene_id,
        algorithm=algorithm,
        scale=int(scale),
        config=config.to_dict(),
        config_hash=config_hash(config),
        ladder_speeds=[float(s) for s in scene.ladder.speeds],
        oracle=info.oracle,
        per_frame_optimal=bool(per_frame_optimal),
    )
    for t in range(scene.n_timesteps):
        box = scene.box(t) if info.needs_box else None
        if box is not None and scale > 1:
            box = box.scaled(scale)
        if info.needs_stack:
            decision = step(algorithm, state, config, scene.ladder, stack=_scaled_stack(scene, t, scale))
        elif per_frame_optimal:
            decision = _optimal_step(algorithm, scene, t, scale, box, state, config, profile)
        else:
            frame = subsample(scene.frame(t, state.current_index), scale)
            decision = step(algorithm, state, config, scene.ladder, frame=frame, box=box)
        chosen = subsample(scene.frame(t, decision.smoothed_index), scale)
        trace.steps.append(TraceStep(
            t=t,
            raw_target_index=decision.raw_target_index,
            smoothed_index=decision.smoothed_index,
            shutter_seconds=float(scene.ladder.speeds[decision.smoothed_index]),
            histogram_mean=decision.histogram_mean,
            entropy=entropy(raw_to_srgb(chosen, profile)),
            saturated_pixels=decision.diagnostics.get("saturated_pixels", 0),
            retained_pixels=decision.diagnostics.get("retained_pixels", 0),
        ))
    return trace


@dataclass
class ScaleComparisonEntry:
    scale: int
    trace: SimulationTrace
    ev_diffs: list  # per-frame |log2(shutter / reference shutter)|
    mean_abs_ev_diff: float


@dataclass
class ScaleComparison:
    scene_id: str
    algorithm: str
    reference_scale: int
    entries: list

    def mean_abs_ev_diff(self, scale: int) -> float:
        for e in self.entries:
            if e.scale == scale:
                return e.mean_abs_ev_diff
        raise InvalidArgumentError(f"scale {scale} not part of this comparison", field="scale")

    def to_dict(self) -> dict:
        return {
            "scene_id": self.scene_id,
            "algorithm": self.algorithm,
            "reference_scale": self.reference_scale,
            "entries": [
                {
                    "scale": e.scale,
                    "mean_abs_ev_diff": e.mean_abs_ev_diff,
                    "ev_diffs": e.ev_diffs,
                    "trace": e.trace.to_dict(),
                }
                for e in self.entries
            ],
        }


def compare_scales(scene: SceneSequence, algorithm: str, config: AEConfig = None,
                   scales=(1, 8)) -> ScaleComparison:
    """Run the same algorithm at several subsampling scales; the first scale is
    the reference against which per-frame EV differences are measured."""
    scales = list(scales)
    if len(scales) < 2:
        raise InvalidArgumentError("need at least two scales (first is the reference)", field="scales")
    reference = run(scene, algorithm, config, scales[0])
    ref_shutters = reference.shutters()
    entries = [ScaleComparisonEntry(scales[0], reference, [0.0] * len(reference), 0.0)]
    for s in scales[1:]:
        trace = run(scene, algorithm, config, s)
        diffs = np.abs(np.log2(trace.shutters() / ref_shutters))
        entries.append(ScaleComparisonEntry(s, trace, diffs.tolist(), float(diffs.mean())))
    return ScaleComparison(scene.scene_id, algorithm, scales[0], entries)


def export_trace(trace: SimulationTrace, path, fmt: str = "json") -> Path:
    """Write a trace to disk. JSON round-trips losslessly; CSV carries one row
    per step in TRACE_CSV_COLUMNS order."""
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    if fmt == "json":
        p.write_text(json.dumps(trace.to_dict(), indent=1))
    elif fmt == "csv":
        with p.open("w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=TRACE_CSV_COLUMNS)
            writer.writeheader()
            for s in trace.steps:
                writer.writerow(s.to_dict())
    else:
        raise InvalidArgumentError(f"unknown trace format {fmt!r}", field="format")
    return p


def load_trace(path) -> SimulationTrace:
    return SimulationTrace.from_dict(json.loads(Path(path).read_text()))


def export_frames(scene: SceneSequence, trace: SimulationTrace, profile: IspProfile,
                  out_dir, fps: int = 10) -> Path:
    """Write the chosen sRGB frame per time step plus a playback manifest; at
    the default 10 FPS a 100-step scene plays back in 10 seconds."""
    if len(trace) != scene.n_timesteps:
        raise InvalidArgumentError(
            f"trace has {len(trace)} steps but scene has {scene.n_timesteps}", field="trace"
        )
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    names = []
    for s in trace.steps:
        srgb = raw_to_srgb(scene.frame(s.t, s.smoothed_index), profile)
        name = f"frame_{s.t:03d}.png"
        if not cv2.imwrite(str(out / name), srgb[:, :, ::-1]):
            raise DatasetError(f"failed to write {out / name}", field="path")
        names.append(name)
    manifest = {
        "fps": int(fps),
        "scene_id": scene.scene_id,
        "algorithm": trace.algorithm,
        "frames": names,
    }
    manifest_path = out / "playback.json"
    manifest_path.write_text(json.dumps(manifest, indent=1))
    return manifest_path
