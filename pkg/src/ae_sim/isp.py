"""Minimal deterministic RAW -> sRGB rendering.

A single power curve calibrated so the metering key maps to half-brightness;
the only ISP properties the exposure math relies on are that mapping and
monotonicity.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import InvalidArgumentError
from .image import RawImage

SRGB_BIT_DEPTH = 8


def calibrate_gamma(key_raw: float) -> float:
    """Exponent g with key_raw**g == 0.5."""
    if not 0.0 < key_raw < 1.0:
        raise InvalidArgumentError(f"key must be in (0,1), got {key_raw}", field="key_raw")
    return math.log(0.5) / math.log(key_raw)


@dataclass(frozen=True)
class IspProfile:
    key_raw: float = 0.13
    gamma: float = None

    def __post_init__(self):
        object.__setattr__(self, "gamma", calibrate_gamma(self.key_raw))

    def tone(self, values: np.ndarray) -> np.ndarray:
        """Tone curve on linear values in [0,1]; tone(key_raw) == 0.5."""
        return np.clip(values, 0.0, 1.0) ** self.gamma


@lru_cache(maxsize=32)
def _tone_lut(gamma: float, bit_depth: int) -> np.ndarray:
    levels = (1 << bit_depth) - 1
    ramp = np.arange(levels + 1, dtype=np.float64) / levels
    return np.rint(255.0 * ramp**gamma).astype(np.uint8)


def raw_to_srgb(image: RawImage, profile: IspProfile) -> np.ndarray:
    """8-bit sRGB rendering round(255 * v**g), per channel.

    Input values are snapped to the frame's declared quantization grid first
    (a no-op for frames straight off the sensor model), which keeps the curve
    a pure integer-code lookup.
    """
    lut = _tone_lut(profile.gamma, image.bit_depth)
    return lut[image.codes()]


def linear_to_srgb(values: np.ndarray, profile: IspProfile) -> np.ndarray:
    """Direct (LUT-free) rendering of arbitrary linear values in [0,1]."""
    return np.rint(255.0 * profile.tone(np.asarray(values, dtype=np.float64))).astype(np.uint8)
