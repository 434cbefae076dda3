import json

import numpy as np
import pytest

from ae_sim.dataset import frame_filename, load_dataset, read_raw16, save_dataset, write_raw16
from ae_sim.errors import DatasetError
from ae_sim.exposure import build_ladder, interpolate_exposure

from conftest import make_raw


def test_frame_filename():
    assert frame_filename(0, 0) == "t000_e00.png"
    assert frame_filename(99, 39) == "t099_e39.png"


def test_png_codes_roundtrip(tmp_path):
    rng = np.random.default_rng(0)
    img = make_raw(np.rint(rng.random((10, 14, 3)) * 16383) / 16383)
    write_raw16(tmp_path / "x.png", img)
    back = read_raw16(tmp_path / "x.png", 14)
    assert np.array_equal(back.pixels, img.pixels)


def test_save_load_bit_exact(tmp_path, tiny_scene):
    manifest = save_dataset(tiny_scene, tmp_path / "scene")
    assert len(manifest.frames) == tiny_scene.n_timesteps * tiny_scene.ladder.n_levels
    back = load_dataset(tmp_path / "scene")
    assert back.scene_id == tiny_scene.scene_id
    assert np.allclose(back.ladder.speeds, tiny_scene.ladder.speeds)
    for t in range(tiny_scene.n_timesteps):
        for i in range(tiny_scene.ladder.n_levels):
            assert np.array_equal(back.frame(t, i).pixels, tiny_scene.frame(t, i).pixels)
    assert back.box(0) == tiny_scene.box(0)
    assert back.attributes == tiny_scene.attributes


def test_save_load_save_stable(tmp_path, tiny_scene):
    save_dataset(tiny_scene, tmp_path / "a")
    first = load_dataset(tmp_path / "a")
    save_dataset(first, tmp_path / "b")
    second = load_dataset(tmp_path / "b")
    assert first.manifest_hash == second.manifest_hash
    assert np.array_equal(first.frame(1, 2).pixels, second.frame(1, 2).pixels)


def test_missing_file_named_in_error(tmp_path, tiny_scene):
    save_dataset(tiny_scene, tmp_path / "scene")
    victim = tmp_path / "scene" / frame_filename(1, 3)
    victim.unlink()
    with pytest.raises(DatasetError) as err:
        load_dataset(tmp_path / "scene")
    assert frame_filename(1, 3) in str(err.value)


def test_unknown_version_rejected(tmp_path, tiny_scene):
    save_dataset(tiny_scene, tmp_path / "scene")
    mpath = tmp_path / "scene" / "manifest.json"
    data = json.loads(mpath.read_text())
    data["format_version"] = 99
    mpath.write_text(json.dumps(data))
    with pytest.raises(DatasetError):
        load_dataset(tmp_path / "scene")


def test_dimension_mismatch_detected(tmp_path, tiny_scene):
    save_dataset(tiny_scene, tmp_path / "scene")
    bad = make_raw(np.zeros((4, 4, 3)))
    write_raw16(tmp_path / "scene" / frame_filename(0, 0), bad)
    with pytest.raises(DatasetError):
        load_dataset(tmp_path / "scene")


def test_manifest_mask_frames_consistency(tmp_path, tiny_scene):
    save_dataset(tiny_scene, tmp_path / "scene")
    mpath = tmp_path / "scene" / "manifest.json"
    data = json.loads(mpath.read_text())
    data["captured_mask"][0][0] = False
    mpath.write_text(json.dumps(data))
    with pytest.raises(DatasetError):
        load_dataset(tmp_path / "scene")


def test_partial_stack_interpolates_on_read(tmp_path):
    # hand-built external capture: 3 of 5 ladder levels present
    ladder = build_ladder(1.0, 4.0, 5)
    rng = np.random.default_rng(1)
    rates = rng.uniform(0.05, 0.2, size=(6, 8, 3))
    captured_idx = [0, 2, 4]
    images = {i: make_raw(np.minimum(1.0, np.rint(rates * ladder.speeds[i] * 16383) / 16383))
              for i in captured_idx}
    root = tmp_path / "ext"
    root.mkdir()
    frames = []
    for i, img in images.items():
        name = frame_filename(0, i)
        write_raw16(root / name, img)
        frames.append([0, i, name])
    manifest = {
        "format_version": 1,
        "scene_id": "external",
        "n_timesteps": 1, "width": 8, "height": 6, "bit_depth": 14,
        "ladder_speeds": [float(s) for s in ladder.speeds],
        "attributes": {}, "boxes": None,
        "captured_mask": [[i in captured_idx for i in range(5)]],
        "frames": frames,
    }
    (root / "manifest.json").write_text(json.dumps(manifest))
    seq = load_dataset(root)
    assert seq.captured(0, 0) and not seq.captured(0, 1)
    expected = interpolate_exposure(
        [(float(ladder.speeds[i]), images[i]) for i in captured_idx], float(ladder.speeds[1]))
    assert np.array_equal(seq.frame(0, 1).pixels, expected.pixels)
    stack = seq.stack(0)
    assert list(stack.captured_mask) == [True, False, True, False, True]
