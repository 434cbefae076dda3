"""Minimum-barrier-distance salient-object detection.

The barrier cost of a path is max(values) - min(values) along it. Background
regions connect to the image boundary through low-barrier paths, so their
distance stays small; distinct foreground objects force a large barrier. The
exact distance is approximated with alternating raster / inverse-raster
sweeps that keep, per pixel, the running (max, min) of the best path found so
far and relax each pixel from its causal neighbors.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import InvalidArgumentError
from .image import srgb_luminance


@dataclass(frozen=True)
class SaliencyConfig:
    gamma_threshold: float = 0.1
    beta_weight: float = 14.0
    n_passes: int = 3

    def __post_init__(self):
        if not 0.0 <= self.gamma_threshold <= 1.0:
            raise InvalidArgumentError(
                f"gamma threshold must be in [0,1], got {self.gamma_threshold}", field="gamma_threshold"
            )
        if self.beta_weight < 1.0:
            raise InvalidArgumentError(f"beta weight must be >= 1, got {self.beta_weight}", field="beta_weight")
        if self.n_passes < 1:
            raise InvalidArgumentError(f"need at least one pass, got {self.n_passes}", field="n_passes")


@njit(cache=True)
def _sweep(values, dist, hi, lo, reverse):  # pragma: no cover - jitted
    h, w = values.shape
    for yy in range(h):
        y = h - 1 - yy if reverse else yy
        for xx in range(w):
            x = w - 1 - xx if reverse else xx
            v = values[y, x]
            ny = y + 1 if reverse else y - 1
            nx = x + 1 if reverse else x - 1
            if 0 <= ny < h:
                u = max(hi[ny, x], v)
                l = min(lo[ny, x], v)
                c = u - l
                if c < dist[y, x]:
                    dist[y, x] = c
                    hi[y, x] = u
                    lo[y, x] = l
            if 0 <= nx < w:
                u = max(hi[y, nx], v)
                l = min(lo[y, nx], v)
                c = u - l
                if c < dist[y, x]:
                    dist[y, x] = c
                    hi[y, x] = u
                    lo[y, x] = l


def raster_mbd(values: np.ndarray, n_passes: int = 3) -> np.ndarray:
    """Approximate MBD transform of a 2D value field, seeded at all boundary
    pixels (distance 0 there). Returns the un-normalized distance map."""
    v = np.ascontiguousarray(values, dtype=np.float64)
    if v.ndim != 2 or v.size == 0:
        raise InvalidArgumentError(f"expected a non-empty 2D field, got shape {values.shape}")
    dist = np.full(v.shape, np.inf)
    dist[0, :] = 0.0
    dist[-1, :] = 0.0
    dist[:, 0] = 0.0
    dist[:, -1] = 0.0
    hi = v.copy()
    lo = v.copy()
    for k in range(n_passes):
        _sweep(v, dist, hi, lo, k % 2 == 1)
    dist[~np.isfinite(dist)] = 0.0  # unreachable only on degenerate 1-pixel-wide inputs
    return dist


def mbd_saliency(srgb: np.ndarray, config: SaliencyConfig = SaliencyConfig()) -> np.ndarray:
    """Saliency map in [0,1] from an 8-bit sRGB frame.

    Computed on luminance; min-max normalized, with an all-equal distance map
    (e.g. constant frames) normalizing to all zeros so no pixel is salient.
    """
    lum = srgb_luminance(srgb).astype(np.float64) / 255.0
    dist = raster_mbd(lum, config.n_passes)
    span = dist.max() - dist.min()
    if span <= 0.0:
        return np.zeros_like(dist)
    return (dist - dist.min()) / span


def threshold_map(saliency: np.ndarray, gamma: float) -> np.ndarray:
    """Binary salient mask: strictly greater than gamma."""
    return np.asarray(saliency) > gamma


def weights_from_saliency(mask: np.ndarray, beta: float) -> np.ndarray:
    """Salient pixels weigh beta, the rest 1; an empty mask yields the uniform
    map, reducing the decision to global metering."""
    return np.where(mask, float(beta), 1.0)
