"""Synthetic 4D radiance sequences and the linear sensor model.

A scene script describes a background radiance field, moving objects and
scheduled lights in radiance units of 1/s: a pixel seeing radiance r fills to
min(1, r * t) at shutter time t. Rendering is deterministic for a given
(script, seed); the only randomness is a fixed spatial texture drawn once
from the script seed.
"""
from __future__ import annotations

import math
from collections import OrderedDict
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import CapacityError, InvalidArgumentError, OutOfRangeError
from .exposure import ExposureLadder, ExposureStack
from .image import DEFAULT_BIT_DEPTH, BoundingBox, RawImage, quantize

# Refuse to synthesize sequences above this many pixel samples outright.
MAX_SEQUENCE_PIXELS = 20_000_000_000

ATTRIBUTE_FLAGS = ("backlight", "moving_light", "flashing_light", "reflective", "preferred")


@dataclass(frozen=True)
class Region:
    """Spatial footprint: ("full",), ("rect", x0, y0, x1, y1) or ("disk", cx, cy, r)."""

    kind: str
    params: tuple = ()

    def __post_init__(self):
        if self.kind not in ("full", "rect", "disk"):
            raise InvalidArgumentError(f"unknown region kind {self.kind!r}")
        n = {"full": 0, "rect": 4, "disk": 3}[self.kind]
        if len(self.params) != n:
            raise InvalidArgumentError(f"region {self.kind!r} needs {n} params, got {len(self.params)}")
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))

    def mask(self, height: int, width: int) -> np.ndarray:
        if self.kind == "full":
            return np.ones((height, width), dtype=bool)
        if self.kind == "rect":
            x0, y0, x1, y1 = self.params
            m = np.zeros((height, width), dtype=bool)
            m[max(int(y0), 0):int(y1), max(int(x0), 0):int(x1)] = True
            return m
        cx, cy, r = self.params
        yy, xx = np.mgrid[0:height, 0:width]
        return (xx - cx) ** 2 + (yy - cy) ** 2 <= r * r


@dataclass(frozen=True)
class MovingObject:
    """Solid "disk"/"rect" shapes alpha-composite their radiance over the
    background; a "spot" is an additive glowing source with an exponential
    falloff, size = (core_radius, falloff_length). Exponential tails keep the
    visible edge band several pixels wide at any exposure, which is what makes
    bright lights behave consistently under subsampling."""

    shape: str  # "disk" | "rect" | "spot"
    size: tuple  # (radius,) / (w, h) / (core_radius, falloff_length)
    radiance: tuple  # linear RGB, 1/s
    path: tuple  # one (x, y) center per time step
    preferred: bool = False
    soft: float = 0.0  # disks only: fraction of the radius over which coverage ramps to 0

    def __post_init__(self):
        if self.shape not in ("disk", "rect", "spot"):
            raise InvalidArgumentError(f"unknown object shape {self.shape!r}")
        object.__setattr__(self, "size", tuple(float(s) for s in self.size))
        object.__setattr__(self, "radiance", tuple(float(r) for r in self.radiance))
        object.__setattr__(self, "path", tuple((float(x), float(y)) for x, y in self.path))
        if min(self.radiance) < 0:
            raise InvalidArgumentError("object radiance must be >= 0")
        if not 0.0 <= self.soft < 1.0:
            raise InvalidArgumentError(f"soft fraction must be in [0,1), got {self.soft}", field="soft")

    @property
    def additive(self) -> bool:
        return self.shape == "spot"

    def coverage_at(self, t: int, height: int, width: int) -> np.ndarray:
        """Per-pixel coverage in [0,1] at step t (solid shapes). Disk edges
        always ramp over at least one pixel so subsampled renderings stay
        consistent with the full-resolution histogram."""
        x, y = self.path[t]
        if self.shape == "rect":
            w, h = self.size
            return Region("rect", (x - w / 2, y - h / 2, x + w / 2, y + h / 2)).mask(height, width)
        r = self.size[0]
        yy, xx = np.mgrid[0:height, 0:width]
        d = np.sqrt((xx - x) ** 2 + (yy - y) ** 2)
        ramp = max(self.soft * r, 1.0)
        return np.clip((r - d) / ramp, 0.0, 1.0)

    def emission_at(self, t: int, height: int, width: int) -> np.ndarray:
        """Additive falloff profile in [0,1] at step t (spot shape)."""
        x, y = self.path[t]
        core, lam = self.size
        yy, xx = np.mgrid[0:height, 0:width]
        d = np.sqrt((xx - x) ** 2 + (yy - y) ** 2)
        return np.exp(-np.maximum(d - core, 0.0) / lam)

    def box_at(self, t: int, width: int, height: int) -> BoundingBox:
        x, y = self.path[t]
        if self.shape in ("disk", "spot"):
            r = self.size[0] if self.shape == "disk" else self.size[0] + self.size[1]
            raw = (x - r, y - r, x + r + 1, y + r + 1)
        else:
            w, h = self.size
            raw = (x - w / 2, y - h / 2, x + w / 2 + 1, y + h / 2 + 1)
        return BoundingBox(int(raw[0]), int(raw[1]), int(math.ceil(raw[2])), int(math.ceil(raw[3]))).clipped(
            width, height
        )


@dataclass(frozen=True)
class LightSchedule:
    intervals: tuple  # closed time-step ranges ((t0, t1), ...)
    intensity: float
    footprint: Region

    def __post_init__(self):
        object.__setattr__(self, "intervals", tuple((int(a), int(b)) for a, b in self.intervals))
        for a, b in self.intervals:
            if b < a:
                raise InvalidArgumentError(f"light interval [{a},{b}] is reversed")
        if self.intensity <= 0:
            raise InvalidArgumentError("light intensity must be positive")

    def active(self, t: int) -> bool:
        return any(a <= t <= b for a, b in self.intervals)


@dataclass(frozen=True)
class NoiseProfile:
    """Optional sensor noise for robustness testing; disabled in all bundled
    scenes and in the acceptance suite (it breaks exact linearity)."""

    read_sigma: float = 0.0  # constant floor, [0,1] units
    shot_scale: float = 0.0  # scales the sqrt(signal) term

    def __post_init__(self):
        if self.read_sigma < 0 or self.shot_scale < 0:
            raise InvalidArgumentError("noise terms must be >= 0")

    @property
    def enabled(self) -> bool:
        return self.read_sigma > 0 or self.shot_scale > 0


def apply_sensor_noise(image: RawImage, profile: NoiseProfile, seed_key) -> RawImage:
    """Add signal-dependent gaussian noise, deterministic for a given seed key
    (the synthesizer keys on (scene seed, t, ladder index))."""
    if not profile.enabled:
        return image
    rng = np.random.default_rng(list(seed_key))
    sigma = profile.read_sigma + profile.shot_scale * np.sqrt(image.pixels)
    noisy = image.pixels + sigma * rng.standard_normal(image.pixels.shape)
    return RawImage(quantize(noisy, image.bit_depth), bit_depth=image.bit_depth)


@dataclass(frozen=True)
class SceneScript:
    scene_id: str
    n_timesteps: int
    width: int
    height: int
    background: tuple  # linear RGB radiance, 1/s
    objects: tuple = ()
    lights: tuple = ()
    boxes: tuple = None  # explicit per-step ground-truth boxes; default derives from preferred objects
    attributes: dict = field(default_factory=dict)
    seed: int = 0
    gradient: float = 0.3  # horizontal shading ramp amplitude
    texture_amp: float = 0.03
    texture_cells: int = 8
    bit_depth: int = DEFAULT_BIT_DEPTH
    noise: NoiseProfile = field(default_factory=NoiseProfile)

    def __post_init__(self):
        if self.n_timesteps < 1:
            raise InvalidArgumentError("n_timesteps must be >= 1", field="n_timesteps")
        if self.width < 2 or self.height < 2:
            raise InvalidArgumentError("scene must be at least 2x2 pixels")
        object.__setattr__(self, "background", tuple(float(v) for v in self.background))
        if min(self.background) < 0:
            raise InvalidArgumentError("background radiance must be >= 0")
        object.__setattr__(self, "objects", tuple(self.objects))
        object.__setattr__(self, "lights", tuple(self.lights))
        for obj in self.objects:
            if len(obj.path) != self.n_timesteps:
                raise InvalidArgumentError(
                    f"object path length {len(obj.path)} != n_timesteps {self.n_timesteps}"
                )
        for light in self.lights:
            for a, b in light.intervals:
                if not (0 <= a and b < self.n_timesteps):
                    raise InvalidArgumentError(f"light interval [{a},{b}] outside 0..{self.n_timesteps - 1}")
        if self.boxes is not None:
            boxes = tuple(self.boxes)
            if len(boxes) != self.n_timesteps:
                raise InvalidArgumentError("boxes must have one entry per time step", field="boxes")
            object.__setattr__(self, "boxes", boxes)
        attrs = {k: bool(self.attributes.get(k, False)) for k in ATTRIBUTE_FLAGS}
        object.__setattr__(self, "attributes", attrs)

    def preferred_box(self, t: int) -> BoundingBox | None:
        """Ground-truth semantic box: explicit if provided, else the union of
        the preferred objects' geometry at step t."""
        if self.boxes is not None:
            return self.boxes[t]
        boxes = [o.box_at(t, self.width, self.height) for o in self.objects if o.preferred]
        if not boxes:
            return None
        return BoundingBox(
            min(b.x0 for b in boxes),
            min(b.y0 for b in boxes),
            max(b.x1 for b in boxes),
            max(b.y1 for b in boxes),
        )

    def to_dict(self) -> dict:
        return {
            "scene_id": self.scene_id,
            "n_timesteps": self.n_timesteps,
            "width": self.width,
            "height": self.height,
            "background": list(self.background),
            "objects": [
                {
                    "shape": o.shape,
                    "size": list(o.size),
                    "radiance": list(o.radiance),
                    "path": [list(p) for p in o.path],
                    "preferred": o.preferred,
                    "soft": o.soft,
                }
                for o in self.objects
            ],
            "lights": [
                {
                    "intervals": [list(i) for i in l.intervals],
                    "intensity": l.intensity,
                    "footprint": {"kind": l.footprint.kind, "params": list(l.footprint.params)},
                }
                for l in self.lights
            ],
            "boxes": None if self.boxes is None else [list(b.as_tuple()) for b in self.boxes],
            "attributes": dict(self.attributes),
            "seed": self.seed,
            "gradient": self.gradient,
            "texture_amp": self.texture_amp,
            "texture_cells": self.texture_cells,
            "bit_depth": self.bit_depth,
            "noise": {"read_sigma": self.noise.read_sigma, "shot_scale": self.noise.shot_scale},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SceneScript":
        try:
            return cls(
                scene_id=d["scene_id"],
                n_timesteps=d["n_timesteps"],
                width=d["width"],
                height=d["height"],
                background=tuple(d["background"]),
                objects=tuple(
                    MovingObject(
                        shape=o["shape"],
                        size=tuple(o["size"]),
                        radiance=tuple(o["radiance"]),
                        path=tuple(tuple(p) for p in o["path"]),
                        preferred=o.get("preferred", False),
                        soft=o.get("soft", 0.0),
                    )
                    for o in d.get("objects", ())
                ),
                lights=tuple(
                    LightSchedule(
                        intervals=tuple(tuple(i) for i in l["intervals"]),
                        intensity=l["intensity"],
                        footprint=Region(l["footprint"]["kind"], tuple(l["footprint"]["params"])),
                    )
                    for l in d.get("lights", ())
                ),
                boxes=None
                if d.get("boxes") is None
                else tuple(BoundingBox(*b) for b in d["boxes"]),
                attributes=d.get("attributes", {}),
                seed=d.get("seed", 0),
                gradient=d.get("gradient", 0.3),
                texture_amp=d.get("texture_amp", 0.03),
                texture_cells=d.get("texture_cells", 8),
                bit_depth=d.get("bit_depth", DEFAULT_BIT_DEPTH),
                noise=NoiseProfile(**d.get("noise", {})),
            )
        except KeyError as exc:
            raise InvalidArgumentError(f"scene script missing field {exc}") from exc


@lru_cache(maxsize=32)
def _value_noise(seed: int, height: int, width: int, cells: int) -> np.ndarray:
    """Smooth spatial noise in [-1,1]: a coarse random grid, bilinearly upsampled."""
    rng = np.random.default_rng(seed)
    grid = rng.uniform(-1.0, 1.0, size=(cells + 1, cells + 1))
    gy = np.linspace(0.0, cells, height)
    gx = np.linspace(0.0, cells, width)
    y0 = np.minimum(gy.astype(int), cells - 1)
    x0 = np.minimum(gx.astype(int), cells - 1)
    fy = (gy - y0)[:, None]
    fx = (gx - x0)[None, :]
    a = grid[np.ix_(y0, x0)]
    b = grid[np.ix_(y0, x0 + 1)]
    c = grid[np.ix_(y0 + 1, x0)]
    d = grid[np.ix_(y0 + 1, x0 + 1)]
    return a * (1 - fy) * (1 - fx) + b * (1 - fy) * fx + c * fy * (1 - fx) + d * fy * fx


def generate_radiance(script: SceneScript, t: int) -> np.ndarray:
    """Radiance field (H,W,3) at step t: background, then objects composited at
    their step positions, shading applied, then active lights multiplied in."""
    if not 0 <= t < script.n_timesteps:
        raise InvalidArgumentError(
            f"time step {t} outside 0..{script.n_timesteps - 1}", field="t"
        )
    h, w = script.height, script.width
    out = np.broadcast_to(np.asarray(script.background), (h, w, 3)).copy()
    for obj in script.objects:
        if obj.additive:
            out = out + np.asarray(obj.radiance) * obj.emission_at(t, h, w)[:, :, None]
        else:
            alpha = obj.coverage_at(t, h, w)[:, :, None]
            out = out * (1.0 - alpha) + np.asarray(obj.radiance) * alpha
    shading = 1.0 + script.gradient * (np.arange(w) / max(w - 1, 1) - 0.5)
    field2d = shading[None, :] * (1.0 + script.texture_amp * _value_noise(script.seed, h, w, script.texture_cells))
    out *= field2d[:, :, None]
    for light in script.lights:
        if light.active(t):
            m = light.footprint.mask(h, w)
            out[m] *= light.intensity
    return out


def render_exposure(radiance: np.ndarray, shutter: float, bit_depth: int = DEFAULT_BIT_DEPTH) -> RawImage:
    """Linear sensor model: v = min(1, radiance * t), quantized round-to-nearest."""
    if shutter <= 0:
        raise InvalidArgumentError(f"shutter time must be positive, got {shutter}", field="shutter")
    radiance = np.asarray(radiance, dtype=np.float64)
    if np.any(radiance < 0):
        raise InvalidArgumentError("radiance must be >= 0")
    return RawImage(quantize(radiance * shutter, bit_depth), bit_depth=bit_depth)


class SceneSequence:
    """A time sequence of exposure stacks; subclasses provide frame storage."""

    def __init__(self, scene_id, ladder, n_timesteps, width, height, bit_depth, attributes=None, boxes=None):
        self.scene_id = scene_id
        self.ladder = ladder
        self.n_timesteps = int(n_timesteps)
        self.width = int(width)
        self.height = int(height)
        self.bit_depth = int(bit_depth)
        self.attributes = {k: bool((attributes or {}).get(k, False)) for k in ATTRIBUTE_FLAGS}
        self._boxes = boxes

    def check_bounds(self, t: int, index: int):
        if not 0 <= t < self.n_timesteps:
            raise OutOfRangeError(f"time step {t} outside 0..{self.n_timesteps - 1}", field="t")
        if not 0 <= index < self.ladder.n_levels:
            raise OutOfRangeError(f"exposure index {index} outside 0..{self.ladder.n_levels - 1}", field="index")

    def frame(self, t: int, index: int) -> RawImage:
        raise NotImplementedError

    def captured(self, t: int, index: int) -> bool:
        self.check_bounds(t, index)
        return True

    def stack(self, t: int) -> ExposureStack:
        self.check_bounds(t, 0)
        images = [self.frame(t, i) for i in range(self.ladder.n_levels)]
        mask = np.array([self.captured(t, i) for i in range(self.ladder.n_levels)])
        return ExposureStack(self.ladder, images, mask)

    def box(self, t: int) -> BoundingBox | None:
        self.check_bounds(t, 0)
        if self._boxes is None:
            return None
        return self._boxes[t]

    @property
    def has_boxes(self) -> bool:
        return self._boxes is not None and any(b is not None for b in self._boxes)


class SynthesizedSequence(SceneSequence):
    """Script-backed sequence; frames are rendered on demand (deterministic),
    with a small per-step radiance cache."""

    def __init__(self, script: SceneScript, ladder: ExposureLadder):
        boxes = [script.preferred_box(t) for t in range(script.n_timesteps)]
        if not any(b is not None for b in boxes):
            boxes = None
        super().__init__(
            script.scene_id, ladder, script.n_timesteps, script.width, script.height,
            script.bit_depth, script.attributes, boxes,
        )
        self.script = script
        self._radiance_cache = OrderedDict()

    def radiance(self, t: int) -> np.ndarray:
        if t not in self._radiance_cache:
            self._radiance_cache[t] = generate_radiance(self.script, t)
            while len(self._radiance_cache) > 4:
                self._radiance_cache.popitem(last=False)
        return self._radiance_cache[t]

    def frame(self, t: int, index: int) -> RawImage:
        self.check_bounds(t, index)
        clean = render_exposure(self.radiance(t), float(self.ladder.speeds[index]), self.bit_depth)
        if self.script.noise.enabled:
            return apply_sensor_noise(clean, self.script.noise, (self.script.seed, t, index))
        return clean


class ArraySequence(SceneSequence):
    """In-memory sequence over a nested [t][index] list of RawImage."""

    def __init__(self, scene_id, ladder, frames, bit_depth=DEFAULT_BIT_DEPTH, attributes=None, boxes=None):
        first = frames[0][0]
        super().__init__(scene_id, ladder, len(frames), first.width, first.height, bit_depth, attributes, boxes)
        self.frames = frames

    def frame(self, t: int, index: int) -> RawImage:
        self.check_bounds(t, index)
        return self.frames[t][index]


def synthesize_scene(script: SceneScript, ladder: ExposureLadder) -> SynthesizedSequence:
    total = script.n_timesteps * ladder.n_levels * script.width * script.height * 3
    if total > MAX_SEQUENCE_PIXELS:
        raise CapacityError(
            f"sequence of {total} pixel samples exceeds the {MAX_SEQUENCE_PIXELS} limit"
        )
    return SynthesizedSequence(script, ladder)
