"""Weighted metering histograms, saturation clipping and entropy.

A histogram is conceptually a vector of pixel intensities with per-pixel
weights deciding how much each pixel matters to the exposure decision; it is
stored as fixed-width bins over [0,1], which changes the weighted mean by at
most half a bin width.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptyHistogramError, InvalidArgumentError
from .image import RawImage, srgb_luminance

RAW_BINS = 1024
SRGB_BINS = 256


@dataclass(frozen=True)
class WeightedHistogram:
    bin_weights: np.ndarray

    @property
    def n_bins(self) -> int:
        return int(self.bin_weights.size)

    @property
    def centers(self) -> np.ndarray:
        n = self.n_bins
        return (np.arange(n) + 0.5) / n

    @property
    def total_weight(self) -> float:
        return float(self.bin_weights.sum())


def _luminance_of(image) -> np.ndarray:
    if isinstance(image, RawImage):
        return image.luminance()
    arr = np.asarray(image, dtype=np.float64)
    return arr.mean(axis=2) if arr.ndim == 3 else arr


def bin_index(luminance: np.ndarray, n_bins: int) -> np.ndarray:
    idx = (luminance * n_bins).astype(np.int64)
    return np.minimum(idx, n_bins - 1)


def build_histogram(image, wmap: np.ndarray, n_bins: int = RAW_BINS) -> WeightedHistogram:
    lum = _luminance_of(image)
    wmap = np.asarray(wmap, dtype=np.float64)
    if wmap.shape != lum.shape:
        raise InvalidArgumentError(
            f"weight map shape {wmap.shape} does not match image {lum.shape}"
        )
    if np.any(wmap < 0) or not np.all(np.isfinite(wmap)):
        raise InvalidArgumentError("weights must be finite and >= 0")
    idx = bin_index(lum, n_bins)
    weights = np.bincount(idx.ravel(), weights=wmap.ravel(), minlength=n_bins)
    return WeightedHistogram(weights)


def clip_saturated(
    image,
    wmap: np.ndarray,
    threshold: float = 0.9,
    retain_fraction: float = 0.01,
    mode: str = "absolute",
) -> np.ndarray:
    """Zero the weights of near-saturated pixels, keeping a small deterministic
    subset (every k-th saturated pixel in row-major order, k = floor(1/fraction))
    so the histogram can never come back empty.

    mode "absolute" compares luminance against `threshold` directly;
    "relative" against threshold * max luminance of the frame.
    """
    if not 0.0 < threshold < 1.0:
        raise InvalidArgumentError(f"threshold must be in (0,1), got {threshold}", field="threshold")
    if not 0.0 <= retain_fraction <= 1.0:
        raise InvalidArgumentError(
            f"retain_fraction must be in [0,1], got {retain_fraction}", field="retain_fraction"
        )
    if mode not in ("absolute", "relative"):
        raise InvalidArgumentError(f"unknown clip mode {mode!r}", field="mode")
    lum = _luminance_of(image)
    wmap = np.asarray(wmap, dtype=np.float64)
    if wmap.shape != lum.shape:
        raise InvalidArgumentError(
            f"weight map shape {wmap.shape} does not match image {lum.shape}"
        )
    cut = threshold if mode == "absolute" else threshold * float(lum.max())
    flat_sat = np.flatnonzero((lum > cut).ravel())
    if flat_sat.size == 0:
        return wmap.copy()
    out = wmap.ravel().copy()
    out[flat_sat] = 0.0
    if retain_fraction > 0.0:
        k = max(int(1.0 / retain_fraction), 1)
        keep = flat_sat[::k]
        out[keep] = wmap.ravel()[keep]
    return out.reshape(wmap.shape)


def weighted_mean(hist: WeightedHistogram) -> float:
    total = hist.total_weight
    if total <= 0.0:
        raise EmptyHistogramError("histogram has zero total weight")
    return float(np.dot(hist.centers, hist.bin_weights) / total)


def entropy(srgb: np.ndarray) -> float:
    """Shannon entropy in bits of the 256-bin luminance histogram."""
    counts = np.bincount(srgb_luminance(srgb).ravel(), minlength=SRGB_BINS)
    p = counts[counts > 0] / counts.sum()
    return float(-(p * np.log2(p)).sum())
