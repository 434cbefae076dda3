"""On-disk dataset format: one 16-bit PNG per captured (time, exposure) frame
plus a versioned JSON manifest.

PNGs store the raw integer codes of the frame's quantization grid (value =
code / (2**bit_depth - 1)), so a save/load round trip is bit-exact. Levels
that were never captured carry no file and are interpolated on read.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import cv2
import numpy as np

from .errors import DatasetError
from .exposure import ExposureLadder, interpolate_exposure
from .image import BoundingBox, RawImage
from .scene import SceneSequence

FORMAT_VERSION = 1
MANIFEST_NAME = "manifest.json"


def frame_filename(t: int, index: int) -> str:
    return f"t{t:03d}_e{index:02d}.png"


def write_raw16(path: Path, image: RawImage):
    codes = image.codes()
    if not cv2.imwrite(str(path), codes[:, :, ::-1]):  # cv2 expects BGR order
        raise DatasetError(f"failed to write {path}", field="path")


def read_raw16(path: Path, bit_depth: int) -> RawImage:
    arr = cv2.imread(str(path), cv2.IMREAD_UNCHANGED)
    if arr is None:
        raise DatasetError(f"cannot decode image file {path}", field="path")
    if arr.ndim != 3 or arr.shape[2] != 3 or arr.dtype != np.uint16:
        raise DatasetError(f"{path} is not a 16-bit RGB PNG", field="path")
    levels = (1 << bit_depth) - 1
    return RawImage(arr[:, :, ::-1].astype(np.float64) / levels, bit_depth=bit_depth)


@dataclass
class DatasetManifest:
    scene_id: str
    n_timesteps: int
    width: int
    height: int
    bit_depth: int
    ladder_speeds: list
    attributes: dict
    boxes: list  # per-step [x0,y0,x1,y1] or None; or None if no boxes at all
    captured_mask: list  # [t][index] booleans
    frames: list  # [t, index, relative path] for every captured frame
    format_version: int = FORMAT_VERSION

    def to_dict(self) -> dict:
        return {
            "format_version": self.format_version,
            "scene_id": self.scene_id,
            "n_timesteps": self.n_timesteps,
            "width": self.width,
            "height": self.height,
            "bit_depth": self.bit_depth,
            "ladder_speeds": self.ladder_speeds,
            "attributes": self.attributes,
            "boxes": self.boxes,
            "captured_mask": self.captured_mask,
            "frames": self.frames,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DatasetManifest":
        version = d.get("format_version")
        if version != FORMAT_VERSION:
            raise DatasetError(f"unsupported manifest format version {version!r}", field="format_version")
        missing = [k for k in ("scene_id", "n_timesteps", "width", "height", "bit_depth",
                               "ladder_speeds", "captured_mask", "frames") if k not in d]
        if missing:
            raise DatasetError(f"manifest missing fields: {', '.join(missing)}")
        return cls(
            scene_id=d["scene_id"],
            n_timesteps=d["n_timesteps"],
            width=d["width"],
            height=d["height"],
            bit_depth=d["bit_depth"],
            ladder_speeds=d["ladder_speeds"],
            attributes=d.get("attributes", {}),
            boxes=d.get("boxes"),
            captured_mask=d["captured_mask"],
            frames=d["frames"],
        )


def save_dataset(seq: SceneSequence, out_dir) -> DatasetManifest:
    """Write all captured frames of a sequence plus its manifest.

    Uncaptured (interpolated) levels are recorded in the captured mask but get
    no file; they are re-derived on load. For fully rendered sequences the
    round trip is bit-exact.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    frames = []
    mask_rows = []
    for t in range(seq.n_timesteps):
        row = []
        for i in range(seq.ladder.n_levels):
            cap = bool(seq.captured(t, i))
            row.append(cap)
            if cap:
                name = frame_filename(t, i)
                write_raw16(out / name, seq.frame(t, i))
                frames.append([t, i, name])
        mask_rows.append(row)
    boxes = None
    if seq.has_boxes:
        boxes = [None if seq.box(t) is None else list(seq.box(t).as_tuple()) for t in range(seq.n_timesteps)]
    manifest = DatasetManifest(
        scene_id=seq.scene_id,
        n_timesteps=seq.n_timesteps,
        width=seq.width,
        height=seq.height,
        bit_depth=seq.bit_depth,
        ladder_speeds=[float(s) for s in seq.ladder.speeds],
        attributes=dict(seq.attributes),
        boxes=boxes,
        captured_mask=mask_rows,
        frames=frames,
    )
    (out / MANIFEST_NAME).write_text(json.dumps(manifest.to_dict(), indent=1))
    return manifest


class DiskSequence(SceneSequence):
    """Sequence backed by a saved dataset directory.

    Captured frames are read from their PNGs (small LRU cache); uncaptured
    levels are interpolated from the captured neighbors of the same step.
    """

    def __init__(self, root: Path, manifest: DatasetManifest, manifest_hash: str):
        boxes = None
        if manifest.boxes is not None:
            boxes = [None if b is None else BoundingBox(*b) for b in manifest.boxes]
        super().__init__(
            manifest.scene_id,
            ExposureLadder(np.asarray(manifest.ladder_speeds)),
            manifest.n_timesteps,
            manifest.width,
            manifest.height,
            manifest.bit_depth,
            manifest.attributes,
            boxes,
        )
        self.root = root
        self.manifest = manifest
        self.manifest_hash = manifest_hash
        self._mask = np.asarray(manifest.captured_mask, dtype=bool)
        self._paths = {(t, i): name for t, i, name in manifest.frames}
        self._read = lru_cache(maxsize=128)(self._read_frame)

    def captured(self, t: int, index: int) -> bool:
        self.check_bounds(t, index)
        return bool(self._mask[t, index])

    def frame_path(self, t: int, index: int) -> Path | None:
        self.check_bounds(t, index)
        name = self._paths.get((t, index))
        return None if name is None else self.root / name

    def _read_frame(self, t: int, index: int) -> RawImage:
        img = read_raw16(self.root / self._paths[(t, index)], self.bit_depth)
        if img.height != self.height or img.width != self.width:
            raise DatasetError(
                f"{self._paths[(t, index)]} is {img.width}x{img.height}, "
                f"manifest declares {self.width}x{self.height}",
                field="frames",
            )
        return img

    def frame(self, t: int, index: int) -> RawImage:
        self.check_bounds(t, index)
        if self._mask[t, index]:
            return self._read(t, index)
        captured = [
            (float(self.ladder.speeds[i]), self._read(t, i))
            for i in range(self.ladder.n_levels)
            if self._mask[t, i]
        ]
        return interpolate_exposure(captured, float(self.ladder.speeds[index]))


def load_dataset(path) -> DiskSequence:
    """Load a dataset directory (or its manifest.json path), validating that
    every referenced frame file exists."""
    p = Path(path)
    manifest_path = p / MANIFEST_NAME if p.is_dir() else p
    if not manifest_path.is_file():
        raise DatasetError(f"manifest not found at {manifest_path}", field="path")
    raw_bytes = manifest_path.read_bytes()
    try:
        data = json.loads(raw_bytes)
    except json.JSONDecodeError as exc:
        raise DatasetError(f"manifest {manifest_path} is not valid JSON: {exc}") from exc
    manifest = DatasetManifest.from_dict(data)
    root = manifest_path.parent
    mask = np.asarray(manifest.captured_mask, dtype=bool)
    if mask.shape != (manifest.n_timesteps, len(manifest.ladder_speeds)):
        raise DatasetError("captured_mask shape does not match n_timesteps x n_levels", field="captured_mask")
    declared = {(t, i) for t, i, _ in manifest.frames}
    expected = {(t, i) for t, i in zip(*np.nonzero(mask))}
    if declared != expected:
        raise DatasetError("frames list does not match captured_mask", field="frames")
    for t, row in enumerate(mask):
        if not row.any():
            raise DatasetError(f"time step {t} has no captured frames", field="captured_mask")
    for t, i, name in manifest.frames:
        if not (root / name).is_file():
            raise DatasetError(f"missing frame file {root / name}", field="frames")
    seq = DiskSequence(root, manifest, hashlib.sha256(raw_bytes).hexdigest())
    if manifest.frames:
        t, i, _ = manifest.frames[0]
        seq.frame(t, i)  # decode one frame eagerly to catch dimension mismatches
    return seq
