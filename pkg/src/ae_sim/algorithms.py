"""The four autoexposure controllers and the exposure-modification law.

Global / semantic / saliency metering share one mechanism: build a per-pixel
weight map, clip near-saturated weights, take the weighted histogram mean and
scale the shutter by key / mean. Entropy metering instead searches a full
exposure stack for the sRGB-entropy maximum (an oracle that a real camera
does not have). Raw per-step targets are smoothed over a short history of
time steps before being applied.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgumentError
from .exposure import ExposureLadder, ExposureStack, nearest_index
from .histogram import RAW_BINS, build_histogram, clip_saturated, weighted_mean
from .histogram import entropy as srgb_entropy
from .image import BoundingBox, RawImage
from .isp import IspProfile, raw_to_srgb
from .saliency import SaliencyConfig, mbd_saliency, threshold_map, weights_from_saliency


@dataclass(frozen=True)
class AEConfig:
    key_raw: float = 0.13
    clip_threshold: float = 0.9
    retain_fraction: float = 0.01
    clip_mode: str = "absolute"
    saliency: SaliencyConfig = field(default_factory=SaliencyConfig)
    smoothing_window: int = 4
    start_index: int = 0
    raw_bins: int = RAW_BINS

    def __post_init__(self):
        if not 0.0 < self.key_raw < 1.0:
            raise InvalidArgumentError(f"key must be in (0,1), got {self.key_raw}", field="key_raw")
        if not 0.0 < self.clip_threshold < 1.0:
            raise InvalidArgumentError(
                f"clip threshold must be in (0,1), got {self.clip_threshold}", field="clip_threshold"
            )
        if not 0.0 <= self.retain_fraction <= 1.0:
            raise InvalidArgumentError(
                f"retain fraction must be in [0,1], got {self.retain_fraction}", field="retain_fraction"
            )
        if self.clip_mode not in ("absolute", "relative"):
            raise InvalidArgumentError(f"unknown clip mode {self.clip_mode!r}", field="clip_mode")
        if self.smoothing_window < 1:
            raise InvalidArgumentError(
                f"smoothing window must be >= 1, got {self.smoothing_window}", field="smoothing_window"
            )
        if self.start_index < 0:
            raise InvalidArgumentError(f"start index must be >= 0, got {self.start_index}", field="start_index")

    def to_dict(self) -> dict:
        return {
            "key_raw": self.key_raw,
            "clip_threshold": self.clip_threshold,
            "retain_fraction": self.retain_fraction,
            "clip_mode": self.clip_mode,
            "gamma_threshold": self.saliency.gamma_threshold,
            "beta_weight": self.saliency.beta_weight,
            "n_passes": self.saliency.n_passes,
            "smoothing_window": self.smoothing_window,
            "start_index": self.start_index,
            "raw_bins": self.raw_bins,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AEConfig":
        sal = SaliencyConfig(
            gamma_threshold=d.get("gamma_threshold", 0.1),
            beta_weight=d.get("beta_weight", 14.0),
            n_passes=d.get("n_passes", 3),
        )
        known = {k: d[k] for k in (
            "key_raw", "clip_threshold", "retain_fraction", "clip_mode",
            "smoothing_window", "start_index", "raw_bins",
        ) if k in d}
        return cls(saliency=sal, **known)

    def isp_profile(self) -> IspProfile:
        return IspProfile(key_raw=self.key_raw)


@dataclass
class AEState:
    """Per-run controller memory; one instance must not be stepped concurrently."""

    current_index: int
    history: deque = None  # raw target indices, bounded by the smoothing window
    prev_srgb: np.ndarray = None
    prev_mask: np.ndarray = None

    @classmethod
    def initial(cls, config: AEConfig, ladder: ExposureLadder) -> "AEState":
        if config.start_index >= ladder.n_levels:
            raise InvalidArgumentError(
                f"start index {config.start_index} outside 0..{ladder.n_levels - 1}", field="start_index"
            )
        return cls(current_index=config.start_index, history=deque(maxlen=config.smoothing_window))


@dataclass
class AEDecision:
    raw_target_index: int
    smoothed_index: int = None
    histogram_mean: float = None
    scale_applied: float = None
    diagnostics: dict = field(default_factory=dict)

    def key_fields(self):
        return (self.raw_target_index, self.smoothed_index, self.histogram_mean, self.scale_applied)


def exposure_scale(mean: float, key: float) -> float:
    """Multiplier taking the current shutter toward the key: scale = key / mean."""
    if not 0.0 < key < 1.0:
        raise InvalidArgumentError(f"key must be in (0,1), got {key}", field="key_raw")
    if mean <= 0.0:
        raise InvalidArgumentError(f"histogram mean must be positive, got {mean}", field="mean")
    return key / mean


def _metered_decision(frame: RawImage, wmap: np.ndarray, state: AEState, config: AEConfig,
                      ladder: ExposureLadder) -> AEDecision:
    lum = frame.luminance()
    cut = config.clip_threshold if config.clip_mode == "absolute" else config.clip_threshold * float(lum.max())
    saturated = int((lum > cut).sum())
    clipped = clip_saturated(frame, wmap, config.clip_threshold, config.retain_fraction, config.clip_mode)
    hist = build_histogram(frame, clipped, config.raw_bins)
    mean = weighted_mean(hist)
    if saturated == 0 or config.retain_fraction <= 0:
        retained = 0
    else:
        retained = -(-saturated // max(int(1 / config.retain_fraction), 1))
    diagnostics = {"saturated_pixels": saturated, "retained_pixels": retained}
    if mean <= 0.0:
        # All-black metering: drive to the longest exposure instead of erroring.
        return AEDecision(raw_target_index=ladder.n_levels - 1, histogram_mean=mean,
                          scale_applied=None, diagnostics=diagnostics)
    scale = exposure_scale(mean, config.key_raw)
    target_time = float(ladder.speeds[state.current_index]) * scale
    return AEDecision(
        raw_target_index=nearest_index(ladder, target_time),
        histogram_mean=mean,
        scale_applied=scale,
        diagnostics=diagnostics,
    )


def global_ae(frame: RawImage, state: AEState, config: AEConfig, ladder: ExposureLadder) -> AEDecision:
    """All pixels weigh equally."""
    return _metered_decision(frame, np.ones(frame.pixels.shape[:2]), state, config, ladder)


def semantic_ae(frame: RawImage, box: BoundingBox, state: AEState, config: AEConfig,
                ladder: ExposureLadder) -> AEDecision:
    """Only pixels inside the given bounding box contribute."""
    if box is None:
        raise InvalidArgumentError("semantic metering needs a bounding box", field="box")
    h, w = frame.pixels.shape[:2]
    if box.x0 < 0 or box.y0 < 0 or box.x1 > w or box.y1 > h:
        raise InvalidArgumentError(f"box {box.as_tuple()} outside {w}x{h} frame", field="box")
    decision = _metered_decision(frame, box.mask(h, w).astype(np.float64), state, config, ladder)
    decision.diagnostics["box"] = box.as_tuple()
    return decision


def saliency_ae(frame: RawImage, state: AEState, config: AEConfig, ladder: ExposureLadder) -> AEDecision:
    """Weights from the previous step's saliency map; the first step assumes no
    salient pixels, which reduces to global metering."""
    h, w = frame.pixels.shape[:2]
    if state.prev_srgb is None:
        mask = np.zeros((h, w), dtype=bool)
    else:
        smap = mbd_saliency(state.prev_srgb, config.saliency)
        mask = threshold_map(smap, config.saliency.gamma_threshold)
    wmap = weights_from_saliency(mask, config.saliency.beta_weight)
    decision = _metered_decision(frame, wmap, state, config, ladder)
    decision.diagnostics["salient_pixels"] = int(mask.sum())
    state.prev_mask = mask
    state.prev_srgb = raw_to_srgb(frame, config.isp_profile())
    return decision


def entropy_ae(stack: ExposureStack, profile: IspProfile) -> AEDecision:
    """Index maximizing sRGB entropy across the whole stack; ties resolve to
    the lower (shorter-exposure) index."""
    entropies = np.array([srgb_entropy(raw_to_srgb(img, profile)) for img in stack.images])
    best = int(np.argmax(entropies))
    return AEDecision(
        raw_target_index=best,
        diagnostics={"entropy": float(entropies[best]), "oracle": True},
    )


def smooth_index(raw_target: int, state: AEState) -> int:
    """Push the raw target into the history and return the rounded mean of the
    window; exact .5 means round toward the previous smoothed index."""
    state.history.append(int(raw_target))
    s = sum(state.history)
    n = len(state.history)
    base, rem = divmod(s, n)
    if 2 * rem < n:
        smoothed = base
    elif 2 * rem > n:
        smoothed = base + 1
    else:
        smoothed = base if abs(base - state.current_index) <= abs(base + 1 - state.current_index) else base + 1
    return smoothed


@dataclass(frozen=True)
class AlgorithmInfo:
    name: str
    needs_box: bool = False
    needs_stack: bool = False
    oracle: bool = False


ALGORITHMS = {
    "global": AlgorithmInfo("global"),
    "semantic": AlgorithmInfo("semantic", needs_box=True),
    "saliency": AlgorithmInfo("saliency"),
    "entropy": AlgorithmInfo("entropy", needs_stack=True, oracle=True),
}


def step(kind: str, state: AEState, config: AEConfig, ladder: ExposureLadder, *,
         frame: RawImage = None, box: BoundingBox = None, stack: ExposureStack = None) -> AEDecision:
    """Run one controller step: metering decision, then smoothing. Mutates
    `state` (history, current index, saliency memory) in place."""
    if kind not in ALGORITHMS:
        raise InvalidArgumentError(
            f"unknown algorithm {kind!r}; registered: {', '.join(sorted(ALGORITHMS))}", field="algorithm"
        )
    if kind == "entropy":
        if stack is None:
            raise InvalidArgumentError("entropy metering needs the full exposure stack", field="stack")
        decision = entropy_ae(stack, config.isp_profile())
    elif frame is None:
        raise InvalidArgumentError(f"{kind} metering needs a frame", field="frame")
    elif kind == "global":
        decision = global_ae(frame, state, config, ladder)
    elif kind == "semantic":
        decision = semantic_ae(frame, box, state, config, ladder)
    else:
        decision = saliency_ae(frame, state, config, ladder)
    decision.smoothed_index = smooth_index(decision.raw_target_index, state)
    state.current_index = decision.smoothed_index
    return decision
