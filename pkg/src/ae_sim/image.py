"""Image primitives: linear RAW frames, bounding boxes, quantization and
box-filter subsampling."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError

DEFAULT_BIT_DEPTH = 14


def quantize(values: np.ndarray, bit_depth: int) -> np.ndarray:
    """Clamp to [0,1] and round to the uniform grid of 2**bit_depth levels."""
    if not 1 <= bit_depth <= 16:
        raise InvalidArgumentError(f"bit_depth must be in [1,16], got {bit_depth}", field="bit_depth")
    levels = (1 << bit_depth) - 1
    return np.rint(np.clip(values, 0.0, 1.0) * levels) / levels


@dataclass(frozen=True)
class RawImage:
    """Linear sensor frame, H x W x 3 values in [0,1].

    bit_depth records the quantization grid applied at render time; values of
    derived frames (subsampled, interpolated) may fall off that grid.
    """

    pixels: np.ndarray
    bit_depth: int = DEFAULT_BIT_DEPTH

    def __post_init__(self):
        if self.pixels.ndim != 3 or self.pixels.shape[2] != 3:
            raise InvalidArgumentError(f"expected HxWx3 pixels, got shape {self.pixels.shape}")

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    def luminance(self) -> np.ndarray:
        # Unweighted RGB mean; the metering histogram has no luma transform.
        return self.pixels.mean(axis=2)

    def codes(self) -> np.ndarray:
        """Integer codes on the declared quantization grid (uint16)."""
        levels = (1 << self.bit_depth) - 1
        return np.rint(np.clip(self.pixels, 0.0, 1.0) * levels).astype(np.uint16)


def srgb_luminance(srgb: np.ndarray) -> np.ndarray:
    """Integer luminance 0..255 of an 8-bit sRGB image (floor of RGB mean)."""
    if srgb.dtype != np.uint8:
        raise InvalidArgumentError(f"expected uint8 sRGB image, got {srgb.dtype}")
    return srgb.astype(np.uint16).sum(axis=2) // 3


@dataclass(frozen=True)
class BoundingBox:
    """Half-open pixel box [x0,x1) x [y0,y1)."""

    x0: int
    y0: int
    x1: int
    y1: int

    def __post_init__(self):
        if self.x1 <= self.x0 or self.y1 <= self.y0:
            raise InvalidArgumentError(f"empty bounding box {self.as_tuple()}", field="box")

    def as_tuple(self):
        return (self.x0, self.y0, self.x1, self.y1)

    @property
    def width(self) -> int:
        return self.x1 - self.x0

    @property
    def height(self) -> int:
        return self.y1 - self.y0

    def clipped(self, width: int, height: int) -> "BoundingBox":
        x0 = min(max(self.x0, 0), width - 1)
        y0 = min(max(self.y0, 0), height - 1)
        x1 = max(min(self.x1, width), x0 + 1)
        y1 = max(min(self.y1, height), y0 + 1)
        return BoundingBox(x0, y0, x1, y1)

    def scaled(self, factor: int) -> "BoundingBox":
        """Box in coordinates of an image subsampled by `factor`; never empty."""
        if factor < 1:
            raise InvalidArgumentError(f"scale factor must be >= 1, got {factor}", field="factor")
        x0 = round(self.x0 / factor)
        y0 = round(self.y0 / factor)
        x1 = max(round(self.x1 / factor), x0 + 1)
        y1 = max(round(self.y1 / factor), y0 + 1)
        return BoundingBox(x0, y0, x1, y1)

    def mask(self, height: int, width: int) -> np.ndarray:
        m = np.zeros((height, width), dtype=bool)
        m[self.y0:self.y1, self.x0:self.x1] = True
        return m


def full_frame_box(width: int, height: int) -> BoundingBox:
    return BoundingBox(0, 0, width, height)


def subsample(image: RawImage, factor: int) -> RawImage:
    """Box-average downsampling by `factor` in each dimension.

    Remainder rows/columns are cropped at the bottom/right edge first, so the
    factor always divides the averaged region. Preserves the global mean
    exactly when no cropping occurs.
    """
    if not isinstance(factor, (int, np.integer)) or factor < 1:
        raise InvalidArgumentError(f"subsample factor must be an integer >= 1, got {factor}", field="factor")
    if factor == 1:
        return image
    h = (image.height // factor) * factor
    w = (image.width // factor) * factor
    if h == 0 or w == 0:
        raise InvalidArgumentError(
            f"factor {factor} larger than image {image.width}x{image.height}", field="factor"
        )
    px = image.pixels[:h, :w]
    px = px.reshape(h // factor, factor, w // factor, factor, 3).mean(axis=(1, 3))
    return RawImage(px, bit_depth=image.bit_depth)
