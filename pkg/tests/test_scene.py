import numpy as np
import pytest

from ae_sim.errors import CapacityError, InvalidArgumentError
from ae_sim.exposure import build_ladder
from ae_sim.image import BoundingBox
from ae_sim.scene import (
    LightSchedule,
    MovingObject,
    Region,
    SceneScript,
    generate_radiance,
    render_exposure,
    synthesize_scene,
)
from ae_sim.scenes import bundled_scene_scripts, static_path, static_scene

from conftest import tiny_script


def flashing_script():
    return SceneScript(
        scene_id="flash",
        n_timesteps=100, width=32, height=24,
        background=(0.5, 0.5, 0.5),
        lights=(LightSchedule(((20, 39), (60, 79)), 4.0, Region("rect", (0, 0, 16, 24))),),
        seed=1,
        texture_amp=0.0, gradient=0.0,
    )


def test_flashing_schedule_radiance():
    script = flashing_script()
    on = generate_radiance(script, 25)
    off = generate_radiance(script, 45)
    assert np.allclose(on[:, :16], 2.0)
    assert np.allclose(on[:, 16:], 0.5)
    assert np.allclose(off, 0.5)
    # interval endpoints are inclusive
    assert np.allclose(generate_radiance(script, 39)[:, :16], 2.0)
    assert np.allclose(generate_radiance(script, 40)[:, :16], 0.5)


def test_background_only_constant_over_time():
    script = SceneScript(scene_id="bg", n_timesteps=5, width=16, height=12,
                         background=(0.4, 0.4, 0.4), seed=2)
    fields = [generate_radiance(script, t) for t in range(5)]
    for f in fields[1:]:
        assert np.array_equal(f, fields[0])


def test_object_follows_path():
    path = tuple((float(2 + t), 6.0) for t in range(12))
    script = SceneScript(
        scene_id="move", n_timesteps=12, width=24, height=12,
        background=(0.1, 0.1, 0.1),
        objects=(MovingObject("rect", (4, 4), (0.9, 0.9, 0.9), path),),
        seed=3, texture_amp=0.0, gradient=0.0,
    )
    f10 = generate_radiance(script, 10)
    cx = 12
    assert np.allclose(f10[6, cx - 1:cx + 1], 0.9)
    assert np.allclose(f10[6, 0], 0.1)


def test_generate_radiance_bounds():
    script = tiny_script()
    with pytest.raises(InvalidArgumentError):
        generate_radiance(script, -1)
    with pytest.raises(InvalidArgumentError):
        generate_radiance(script, script.n_timesteps)


def test_render_exposure_examples():
    r = np.full((2, 3, 3), 0.04)
    img = render_exposure(r, 0.5, 14)
    assert np.allclose(img.pixels, 0.02, atol=0.5 / 16383)
    sat = render_exposure(np.full((2, 2, 3), 0.1), 15.0)
    assert np.all(sat.pixels == 1.0)
    with pytest.raises(InvalidArgumentError):
        render_exposure(r, 0.0)
    with pytest.raises(InvalidArgumentError):
        render_exposure(-r, 1.0)


def test_render_linearity_within_quantum():
    rng = np.random.default_rng(4)
    r = rng.uniform(0.01, 0.45, size=(8, 8, 3))
    a = render_exposure(r, 0.7)
    b = render_exposure(r, 1.4)
    mask = r * 1.4 < 1.0
    assert np.abs(b.pixels - 2 * a.pixels)[mask].max() <= (1.0 + 1e-9) / 16383


def test_synthesize_counts_and_determinism(tiny_ladder):
    script = tiny_script()
    seq1 = synthesize_scene(script, tiny_ladder)
    seq2 = synthesize_scene(tiny_script(), tiny_ladder)
    assert seq1.n_timesteps == 3 and seq1.ladder.n_levels == 5
    for t in range(3):
        for i in range(5):
            assert np.array_equal(seq1.frame(t, i).pixels, seq2.frame(t, i).pixels)
    one = synthesize_scene(tiny_script(n_timesteps=1), build_ladder(0.1, 1.0, 2))
    assert len(one.stack(0).images) == 2


def test_synthesize_capacity_guard():
    script = tiny_script(n_timesteps=3)
    huge = build_ladder(1e-4, 1e4, 2)
    big_script = SceneScript(
        scene_id="big", n_timesteps=10_000_000, width=1000, height=1000,
        background=(0.5, 0.5, 0.5), seed=0,
    )
    with pytest.raises(CapacityError):
        synthesize_scene(big_script, huge)
    synthesize_scene(script, huge)  # small is fine


def test_script_validation():
    with pytest.raises(InvalidArgumentError):
        SceneScript(scene_id="x", n_timesteps=0, width=8, height=8, background=(0.1, 0.1, 0.1))
    with pytest.raises(InvalidArgumentError):
        SceneScript(
            scene_id="x", n_timesteps=5, width=8, height=8, background=(0.1, 0.1, 0.1),
            objects=(MovingObject("disk", (2.0,), (1.0, 1.0, 1.0), static_path(3, (4, 4))),),
        )
    with pytest.raises(InvalidArgumentError):
        SceneScript(
            scene_id="x", n_timesteps=5, width=8, height=8, background=(0.1, 0.1, 0.1),
            lights=(LightSchedule(((2, 7),), 2.0, Region("full")),),
        )
    with pytest.raises(InvalidArgumentError):
        Region("rect", (1, 2, 3))
    with pytest.raises(InvalidArgumentError):
        MovingObject("blob", (1.0,), (1, 1, 1), static_path(2, (0, 0)))


def test_script_dict_roundtrip():
    script = bundled_scene_scripts()["scene5"]
    back = SceneScript.from_dict(script.to_dict())
    assert back == script


def test_preferred_box_derived():
    script = tiny_script()
    box = script.preferred_box(0)
    assert isinstance(box, BoundingBox)
    assert box.x0 <= 12 <= box.x1 and box.y0 <= 8 <= box.y1
    no_pref = tiny_script(preferred=False)
    assert no_pref.preferred_box(0) is None


def test_bundled_scene_matrix():
    scripts = bundled_scene_scripts()
    assert len(scripts) == 9
    flags = {sid: s.attributes for sid, s in scripts.items()}
    # attribute matrix of the nine-scene suite
    assert [flags[f"scene{i}"]["backlight"] for i in range(1, 10)] == [
        False, False, False, True, False, False, False, False, True]
    # moving light in scenes 2, 3, 4, 7, 8
    assert [flags[f"scene{i}"]["moving_light"] for i in range(1, 10)] == [
        False, True, True, True, False, False, True, True, False]
    assert [flags[f"scene{i}"]["flashing_light"] for i in range(1, 10)] == [
        False, False, True, True, True, True, False, True, True]
    assert [flags[f"scene{i}"]["reflective"] for i in range(1, 10)] == [
        True, True, True, False, False, True, True, False, False]
    assert [flags[f"scene{i}"]["preferred"] for i in range(1, 10)] == [
        False, False, False, True, True, True, True, True, True]
    for s in scripts.values():
        assert s.n_timesteps == 100 and s.width == 168 and s.height == 112
        if s.attributes["preferred"]:
            assert s.preferred_box(0) is not None


def test_static_scene_is_static(reference_ladder):
    seq = synthesize_scene(static_scene(4, 48, 32), reference_ladder)
    f0 = seq.frame(0, 20).pixels
    for t in range(1, 4):
        assert np.array_equal(seq.frame(t, 20).pixels, f0)


def test_noise_profile_optional_and_deterministic(tiny_ladder):
    import dataclasses

    from ae_sim.scene import NoiseProfile

    base = static_scene(2, 32, 24)
    noisy_script = dataclasses.replace(base, noise=NoiseProfile(read_sigma=0.002, shot_scale=0.01))
    clean = synthesize_scene(base, tiny_ladder)
    noisy = synthesize_scene(noisy_script, tiny_ladder)
    again = synthesize_scene(dataclasses.replace(base, noise=NoiseProfile(0.002, 0.01)), tiny_ladder)
    a = clean.frame(0, 2).pixels
    b = noisy.frame(0, 2).pixels
    assert not np.array_equal(a, b)
    assert np.array_equal(b, again.frame(0, 2).pixels)
    assert b.min() >= 0.0 and b.max() <= 1.0
    assert SceneScript.from_dict(noisy_script.to_dict()) == noisy_script
    # different (t, index) draw different noise
    assert not np.array_equal(noisy.frame(0, 2).pixels - a, noisy.frame(1, 2).pixels - a)
    with pytest.raises(InvalidArgumentError):
        NoiseProfile(read_sigma=-0.1)
