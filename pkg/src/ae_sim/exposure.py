"""Shutter-speed ladder math and exposure-stack expansion.

The solution space of the simulator is a discrete ladder of shutter speeds
with constant EV (log2 time) spacing. Missing ladder levels of a captured
stack are filled by per-pixel interpolation that is linear in exposure
*time*, matching the linear pixel/time model of the sensor below saturation.
"""
from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InvalidArgumentError, OutOfRangeError
from .image import RawImage

# Max tolerated deviation of consecutive log2 gaps in a valid ladder.
EV_SPACING_TOL = 1e-9
# Relative tolerance when matching a target time against a captured time.
TIME_MATCH_RTOL = 1e-12


def ev_relative(a: float, b: float) -> float:
    """Signed EV offset log2(a/b) between two shutter times in seconds."""
    if a <= 0 or b <= 0:
        raise InvalidArgumentError(f"shutter times must be positive, got {a}, {b}")
    return math.log2(a / b)


@dataclass(frozen=True)
class ExposureLadder:
    """Ascending shutter speeds (seconds) with uniform EV spacing."""

    speeds: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.speeds, dtype=np.float64)
        object.__setattr__(self, "speeds", s)
        if s.ndim != 1 or s.size < 2:
            raise InvalidArgumentError("ladder needs at least 2 speeds")
        if np.any(s <= 0):
            raise InvalidArgumentError("shutter times must be positive")
        if np.any(np.diff(s) <= 0):
            raise InvalidArgumentError("ladder speeds must be strictly increasing")
        gaps = np.diff(np.log2(s))
        if gaps.max() - gaps.min() > EV_SPACING_TOL:
            raise InvalidArgumentError(
                f"ladder EV spacing not uniform (max gap deviation {gaps.max() - gaps.min():.3e})"
            )

    @property
    def n_levels(self) -> int:
        return int(self.speeds.size)

    @property
    def t_min(self) -> float:
        return float(self.speeds[0])

    @property
    def t_max(self) -> float:
        return float(self.speeds[-1])

    @property
    def spacing_ev(self) -> float:
        return ev_span(self) / (self.n_levels - 1)


def build_ladder(t_min: float, t_max: float, n_levels: int) -> ExposureLadder:
    """n_levels shutter speeds evenly spaced in EV between t_min and t_max."""
    if t_min <= 0 or t_max <= 0:
        raise InvalidArgumentError(f"shutter times must be positive, got {t_min}, {t_max}")
    if t_min >= t_max:
        raise InvalidArgumentError(f"t_min must be < t_max, got {t_min} >= {t_max}")
    if int(n_levels) != n_levels or n_levels < 2:
        raise InvalidArgumentError(f"n_levels must be an integer >= 2, got {n_levels}", field="n_levels")
    speeds = 2.0 ** np.linspace(math.log2(t_min), math.log2(t_max), int(n_levels))
    # Pin the endpoints exactly; 2**log2(t) can be one ulp off.
    speeds[0] = t_min
    speeds[-1] = t_max
    return ExposureLadder(speeds)


def ev_span(ladder: ExposureLadder) -> float:
    return math.log2(ladder.t_max / ladder.t_min)


def nearest_index(ladder: ExposureLadder, target: float) -> int:
    """Ladder index minimizing |log2(speed/target)|.

    Targets outside the ladder clamp to the end indices. An exact EV midpoint
    resolves to the lower index (shorter exposure).
    """
    if target <= 0:
        raise InvalidArgumentError(f"target shutter time must be positive, got {target}", field="target")
    pos = ev_relative(target, ladder.t_min) / ladder.spacing_ev
    if pos <= 0:
        return 0
    if pos >= ladder.n_levels - 1:
        return ladder.n_levels - 1
    low = int(pos)
    return low if pos - low <= 0.5 else low + 1


@dataclass
class ExposureStack:
    """All ladder-level frames of one scene instant."""

    ladder: ExposureLadder
    images: list
    captured_mask: np.ndarray = field(default=None)

    def __post_init__(self):
        if len(self.images) != self.ladder.n_levels:
            raise InvalidArgumentError(
                f"stack has {len(self.images)} images for a {self.ladder.n_levels}-level ladder"
            )
        if self.captured_mask is None:
            self.captured_mask = np.ones(self.ladder.n_levels, dtype=bool)
        else:
            self.captured_mask = np.asarray(self.captured_mask, dtype=bool)
            if self.captured_mask.shape != (self.ladder.n_levels,):
                raise InvalidArgumentError("captured_mask length must equal n_levels")

    def __getitem__(self, index: int) -> RawImage:
        return self.images[index]

    def __len__(self) -> int:
        return len(self.images)


def _sorted_captured(captured: Sequence[tuple[float, RawImage]]):
    if len(captured) < 2:
        raise InvalidArgumentError(f"need at least 2 captured exposures, got {len(captured)}")
    pairs = sorted(captured, key=lambda p: p[0])
    times = [float(t) for t, _ in pairs]
    if any(t <= 0 for t in times):
        raise InvalidArgumentError("captured shutter times must be positive")
    if any(b - a <= 0 for a, b in zip(times, times[1:])):
        raise InvalidArgumentError("captured shutter times must be distinct")
    return times, [img for _, img in pairs]


def interpolate_exposure(captured: Sequence[tuple[float, RawImage]], target: float) -> RawImage:
    """Per-pixel linear interpolation in exposure time between the two
    captured neighbors bracketing `target`. No extrapolation."""
    if target <= 0:
        raise InvalidArgumentError(f"target shutter time must be positive, got {target}", field="target")
    times, images = _sorted_captured(captured)
    for t, img in zip(times, images):
        if math.isclose(t, target, rel_tol=TIME_MATCH_RTOL):
            return RawImage(img.pixels.copy(), bit_depth=img.bit_depth)
    if target < times[0] or target > times[-1]:
        raise OutOfRangeError(
            f"target {target} s outside captured range [{times[0]}, {times[-1]}] s", field="target"
        )
    hi = bisect_left(times, target)
    lo = hi - 1
    a, b = times[lo], times[hi]
    w = (target - a) / (b - a)
    blended = images[lo].pixels + w * (images[hi].pixels - images[lo].pixels)
    return RawImage(np.clip(blended, 0.0, 1.0), bit_depth=images[lo].bit_depth)


def expand_stack(captured: Sequence[tuple[float, RawImage]], ladder: ExposureLadder) -> ExposureStack:
    """Fill every ladder level from a captured subset spanning the ladder range.

    Captured levels are copied exactly (captured_mask true); all others are
    interpolated between their two nearest captured neighbors.
    """
    times, _ = _sorted_captured(captured)
    if times[0] > ladder.t_min * (1 + 1e-9) or times[-1] < ladder.t_max * (1 - 1e-9):
        raise InvalidArgumentError(
            f"captured range [{times[0]}, {times[-1]}] s does not span the ladder "
            f"[{ladder.t_min}, {ladder.t_max}] s"
        )
    images = []
    mask = np.zeros(ladder.n_levels, dtype=bool)
    for i, speed in enumerate(ladder.speeds):
        mask[i] = any(math.isclose(t, speed, rel_tol=TIME_MATCH_RTOL) for t in times)
        images.append(interpolate_exposure(captured, float(speed)))
    return ExposureStack(ladder, images, mask)
