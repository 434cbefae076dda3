import numpy as np
import pytest

from ae_sim.errors import InvalidArgumentError
from ae_sim.saliency import (
    SaliencyConfig,
    mbd_saliency,
    raster_mbd,
    threshold_map,
    weights_from_saliency,
)

from oracle_mbd import exact_mbd, random_palette_image


def gray_srgb(values):
    arr = np.asarray(values, dtype=np.float64)
    return np.repeat(np.rint(arr * 255).astype(np.uint8)[:, :, None], 3, axis=2)


def test_config_validation():
    with pytest.raises(InvalidArgumentError):
        SaliencyConfig(gamma_threshold=1.2)
    with pytest.raises(InvalidArgumentError):
        SaliencyConfig(beta_weight=0.5)
    with pytest.raises(InvalidArgumentError):
        SaliencyConfig(n_passes=0)


def test_constant_image_all_zero():
    out = mbd_saliency(gray_srgb(np.full((10, 14), 0.5)))
    assert np.all(out == 0.0)


def test_single_bright_center_pixel():
    field = np.zeros((9, 9))
    field[4, 4] = 1.0
    out = mbd_saliency(gray_srgb(field))
    assert out[4, 4] == pytest.approx(1.0)
    assert out[0, :].max() == 0.0 and out[:, 0].max() == 0.0


def test_centered_square():
    field = np.full((32, 32), 0.1)
    field[10:22, 10:22] = 0.9
    out = mbd_saliency(gray_srgb(field))
    assert out[12:20, 12:20].min() >= 0.9
    bg = np.ones((32, 32), dtype=bool)
    bg[9:23, 9:23] = False
    assert out[bg].max() <= 0.1


def test_raster_distance_properties():
    rng = np.random.default_rng(0)
    v = rng.random((20, 24))
    d = raster_mbd(v, 3)
    assert d.min() >= 0.0
    assert d[0, :].max() == 0.0 and d[-1, :].max() == 0.0
    assert d[:, 0].max() == 0.0 and d[:, -1].max() == 0.0


def test_more_passes_never_increase():
    rng = np.random.default_rng(1)
    v = rng.random((24, 24))
    prev = raster_mbd(v, 1)
    for k in (2, 3, 4, 5):
        cur = raster_mbd(v, k)
        assert np.all(cur <= prev + 1e-12)
        prev = cur


def test_raster_close_to_exact_oracle():
    rng = np.random.default_rng(2)
    diffs = []
    for k in range(12):
        img = random_palette_image(rng, size=int(rng.integers(16, 49)),
                                   levels=int(rng.integers(6, 12)), smooth=k % 2 == 0)
        approx = raster_mbd(img, 3)
        exact = exact_mbd(img)
        assert np.all(approx >= exact - 1e-12)  # sweeps only over-estimate
        diffs.append(float(np.abs(approx - exact).mean()))
    assert float(np.mean(diffs)) <= 0.05


def test_threshold_strict():
    m = threshold_map(np.array([0.05, 0.1, 0.2]), 0.1)
    assert list(m) == [False, False, True]
    assert list(threshold_map(np.array([0.0, 0.01]), 0.0)) == [False, True]
    assert not threshold_map(np.zeros((4, 4)), 0.1).any()


def test_weights_from_saliency():
    mask = np.zeros((5, 5), dtype=bool)
    mask[2, :2] = True
    w = weights_from_saliency(mask, 14.0)
    assert (w == 14.0).sum() == 2 and (w == 1.0).sum() == 23
    assert np.all(weights_from_saliency(np.zeros((3, 3), dtype=bool), 14.0) == 1.0)
    assert np.all(weights_from_saliency(mask, 1.0) == 1.0)
