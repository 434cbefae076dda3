import numpy as np
import pytest

from ae_sim.exposure import build_ladder
from ae_sim.image import RawImage
from ae_sim.scene import MovingObject, SceneScript, synthesize_scene
from ae_sim.scenes import default_ladder, static_path

# filled by test_acceptance; echoed after the run so each criterion's verdict
# is visible even with output capture on
ACCEPTANCE_REPORT = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_REPORT:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_REPORT:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def reference_ladder():
    return default_ladder()


@pytest.fixture(scope="session")
def tiny_ladder():
    return build_ladder(0.01, 1.0, 5)


def make_raw(values, bit_depth=14):
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim == 2:
        arr = np.repeat(arr[:, :, None], 3, axis=2)
    return RawImage(arr, bit_depth=bit_depth)


def constant_raw(value, height=8, width=12, bit_depth=14):
    return make_raw(np.full((height, width), value), bit_depth=bit_depth)


def tiny_script(n_timesteps=3, width=24, height=16, seed=5, preferred=True):
    return SceneScript(
        scene_id="tiny",
        n_timesteps=n_timesteps, width=width, height=height,
        background=(0.6, 0.58, 0.55),
        objects=(
            MovingObject("rect", (8, 6), (1.4, 1.35, 1.3), static_path(n_timesteps, (12, 8)),
                         preferred=preferred),
        ),
        seed=seed,
    )


@pytest.fixture()
def tiny_scene(tiny_ladder):
    return synthesize_scene(tiny_script(), tiny_ladder)
