"""Bundled synthetic scene scripts.

Nine scenes covering the challenging-lighting attribute matrix (backlight,
moving light, flashing light, reflective objects, preferred objects) at the
desk-scale resolution, 100 time steps each, plus a static scene used for
convergence checks. Radiance levels are chosen so mid-ladder shutter speeds
expose the background correctly while glints and lit regions push into or
past saturation.
"""
from __future__ import annotations

import math

from .exposure import ExposureLadder, build_ladder
from .scene import LightSchedule, MovingObject, Region, SceneScript, SynthesizedSequence, synthesize_scene

DEFAULT_WIDTH = 168
DEFAULT_HEIGHT = 112
DEFAULT_STEPS = 100

# The reference solution space: 1/500 s .. 15 s over 40 levels.
DEFAULT_T_MIN = 1.0 / 500.0
DEFAULT_T_MAX = 15.0
DEFAULT_LEVELS = 40


def default_ladder() -> ExposureLadder:
    return build_ladder(DEFAULT_T_MIN, DEFAULT_T_MAX, DEFAULT_LEVELS)


def drift_path(n: int, center, amp, period: float, phase: float = 0.0):
    cx, cy = center
    ax, ay = amp
    return tuple(
        (cx + ax * math.sin(2 * math.pi * t / period + phase),
         cy + ay * math.cos(2 * math.pi * t / period + phase))
        for t in range(n)
    )


def linear_path(n: int, start, end):
    x0, y0 = start
    x1, y1 = end
    return tuple(
        (x0 + (x1 - x0) * t / max(n - 1, 1), y0 + (y1 - y0) * t / max(n - 1, 1)) for t in range(n)
    )


def static_path(n: int, center):
    return tuple(center for _ in range(n))


def _glint(center, radiance=400.0, radius=3.0, n=DEFAULT_STEPS, drift=(0.0, 0.0), period=60.0):
    path = static_path(n, center) if drift == (0.0, 0.0) else drift_path(n, center, drift, period)
    return MovingObject("disk", (radius,), (radiance, radiance * 0.97, radiance * 0.92), path, soft=0.5)


def scene_1() -> SceneScript:
    n = DEFAULT_STEPS
    return SceneScript(
        scene_id="scene1",
        n_timesteps=n, width=DEFAULT_WIDTH, height=DEFAULT_HEIGHT,
        background=(0.82, 0.78, 0.72),
        objects=(
            MovingObject("rect", (40, 26), (0.42, 0.40, 0.45), static_path(n, (50, 70))),
            _glint((118, 36), radiance=420.0, radius=3.0, n=n, drift=(2.0, 1.0)),
            _glint((132, 78), radiance=300.0, radius=2.5, n=n),
        ),
        attributes={"reflective": True},
        seed=101,
    )


def scene_2() -> SceneScript:
    n = DEFAULT_STEPS
    return SceneScript(
        scene_id="scene2",
        n_timesteps=n, width=DEFAULT_WIDTH, height=DEFAULT_HEIGHT,
        background=(0.75, 0.74, 0.70),
        objects=(
            MovingObject("disk", (4.5,), (620.0, 605.0, 585.0), linear_path(n, (16, 30), (152, 82)), soft=0.5),
            _glint((40, 88), radiance=320.0, radius=3.0, n=n),
            MovingObject("rect", (36, 26), (2.1, 2.04, 1.95), static_path(n, (120, 30))),
        ),
        attributes={"moving_light": True, "reflective": True},
        seed=202,
    )


def scene_3() -> SceneScript:
    n = DEFAULT_STEPS
    return SceneScript(
        scene_id="scene3",
        n_timesteps=n, width=DEFAULT_WIDTH, height=DEFAULT_HEIGHT,
        background=(0.68, 0.70, 0.66),
        objects=(
            MovingObject("disk", (4.0,), (600.0, 592.0, 575.0), linear_path(n, (148, 20), (22, 90)), soft=0.5),
            _glint((84, 60), radiance=380.0, radius=3.0, n=n, drift=(3.0, 2.0)),
            MovingObject("rect", (32, 22), (1.6, 1.56, 1.5), static_path(n, (40, 24))),
        ),
        lights=(
            LightSchedule(((25, 45), (70, 85)), 4.5, Region("rect", (112, 0, 168, 112))),
        ),
        attributes={"moving_light": True, "flashing_light": True, "reflective": True},
        seed=303,
    )


def scene_4() -> SceneScript:
    n = DEFAULT_STEPS
    return SceneScript(
        scene_id="scene4",
        n_timesteps=n, width=DEFAULT_WIDTH, height=DEFAULT_HEIGHT,
        background=(0.62, 0.60, 0.58),
        objects=(
            MovingObject("rect", (30, 38), (1.42, 1.38, 1.3), drift_path(n, (62, 62), (5.0, 3.0), 70.0),
                         preferred=True),
            MovingObject("disk", (4.0,), (580.0, 570.0, 550.0), linear_path(n, (158, 96), (42, 18)), soft=0.5),
        ),
        lights=(
            # Permanently lit window behind the subject.
            LightSchedule(((0, n - 1),), 18.0, Region("rect", (112, 0, 168, 54))),
            LightSchedule(((30, 50),), 3.5, Region("rect", (0, 0, 112, 112))),
        ),
        attributes={"backlight": True, "moving_light": True, "flashing_light": True, "preferred": True},
        seed=404,
    )


def scene_5() -> SceneScript:
    # Flashing wash over most of the background with a preferred foreground
    # object kept out of the lit region. The light stays below the clip
    # threshold at every visited exposure, so it drags global metering hard
    # while the object weight holds saliency metering near the key; object
    # contrast is moderate so both agree under standard lighting.
    n = DEFAULT_STEPS
    return SceneScript(
        scene_id="scene5",
        n_timesteps=n, width=DEFAULT_WIDTH, height=DEFAULT_HEIGHT,
        background=(0.92, 0.90, 0.86),
        objects=(
            MovingObject("disk", (22.0,), (1.29, 1.26, 1.21), drift_path(n, (138, 56), (4.0, 3.0), 50.0),
                         preferred=True),
        ),
        lights=(
            LightSchedule(((20, 39), (60, 79)), 5.5, Region("rect", (0, 0, 100, 112))),
        ),
        attributes={"flashing_light": True, "preferred": True},
        seed=505,
        gradient=0.1,
        texture_amp=0.01,
        texture_cells=6,
    )


def scene_6() -> SceneScript:
    n = DEFAULT_STEPS
    return SceneScript(
        scene_id="scene6",
        n_timesteps=n, width=DEFAULT_WIDTH, height=DEFAULT_HEIGHT,
        background=(0.78, 0.76, 0.72),
        objects=(
            MovingObject("rect", (32, 24), (1.75, 1.7, 1.62), drift_path(n, (90, 66), (8.0, 4.0), 80.0),
                         preferred=True),
            _glint((36, 30), radiance=460.0, radius=3.5, n=n),
            _glint((140, 90), radiance=280.0, radius=2.5, n=n, drift=(2.0, 2.0)),
        ),
        lights=(
            LightSchedule(((15, 35), (55, 90)), 5.5, Region("rect", (0, 0, 168, 40))),
        ),
        attributes={"flashing_light": True, "reflective": True, "preferred": True},
        seed=606,
    )


def scene_7() -> SceneScript:
    n = DEFAULT_STEPS
    return SceneScript(
        scene_id="scene7",
        n_timesteps=n, width=DEFAULT_WIDTH, height=DEFAULT_HEIGHT,
        background=(0.72, 0.70, 0.66),
        objects=(
            MovingObject("disk", (16.0,), (1.68, 1.62, 1.55), drift_path(n, (84, 52), (10.0, 6.0), 60.0),
                         preferred=True),
            MovingObject("disk", (4.0,), (590.0, 580.0, 560.0), linear_path(n, (20, 100), (150, 96)), soft=0.5),
            _glint((30, 84), radiance=500.0, radius=3.0, n=n),
            _glint((142, 28), radiance=350.0, radius=2.5, n=n, drift=(1.5, 1.0)),
        ),
        attributes={"moving_light": True, "reflective": True, "preferred": True},
        seed=707,
    )


def scene_8() -> SceneScript:
    n = DEFAULT_STEPS
    return SceneScript(
        scene_id="scene8",
        n_timesteps=n, width=DEFAULT_WIDTH, height=DEFAULT_HEIGHT,
        background=(0.66, 0.66, 0.62),
        objects=(
            MovingObject("rect", (28, 34), (1.5, 1.46, 1.38), drift_path(n, (52, 58), (6.0, 5.0), 90.0),
                         preferred=True),
            MovingObject("disk", (4.2,), (600.0, 590.0, 570.0), linear_path(n, (22, 20), (148, 90)), soft=0.5),
        ),
        lights=(
            LightSchedule(((10, 30), (50, 70)), 4.0, Region("disk", (120, 40, 34))),
        ),
        attributes={"moving_light": True, "flashing_light": True, "preferred": True},
        seed=808,
    )


def scene_9() -> SceneScript:
    # Dim foreground figurine against a permanently backlit band, with the
    # spot light flashing on for steps 20-39 and 60-79.
    n = DEFAULT_STEPS
    return SceneScript(
        scene_id="scene9",
        n_timesteps=n, width=DEFAULT_WIDTH, height=DEFAULT_HEIGHT,
        background=(0.48, 0.47, 0.44),
        objects=(
            MovingObject("disk", (14.0,), (0.95, 0.92, 0.88), drift_path(n, (86, 64), (4.0, 3.0), 70.0),
                         preferred=True),
        ),
        lights=(
            LightSchedule(((0, n - 1),), 14.0, Region("rect", (0, 0, 168, 34))),
            LightSchedule(((20, 39), (60, 79)), 5.0, Region("rect", (34, 44, 134, 112))),
        ),
        attributes={"backlight": True, "flashing_light": True, "preferred": True},
        seed=909,
    )


def static_scene(n_timesteps: int = 30, width: int = DEFAULT_WIDTH, height: int = DEFAULT_HEIGHT) -> SceneScript:
    """Time-invariant scene for convergence and calibration checks."""
    return SceneScript(
        scene_id="static",
        n_timesteps=n_timesteps, width=width, height=height,
        background=(0.78, 0.76, 0.72),
        objects=(
            MovingObject("rect", (40, 30), (1.2, 1.16, 1.1), static_path(n_timesteps, (100, 60))),
        ),
        seed=42,
    )


_BUILDERS = (scene_1, scene_2, scene_3, scene_4, scene_5, scene_6, scene_7, scene_8, scene_9)


def bundled_scene_scripts() -> dict[str, SceneScript]:
    return {s.scene_id: s for s in (build() for build in _BUILDERS)}


def bundled_suite(ladder: ExposureLadder = None) -> dict[str, SynthesizedSequence]:
    """All nine bundled scenes synthesized over the given (default) ladder."""
    ladder = ladder or default_ladder()
    return {sid: synthesize_scene(script, ladder) for sid, script in bundled_scene_scripts().items()}
