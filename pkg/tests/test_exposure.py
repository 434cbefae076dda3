import math

import numpy as np
import pytest

from ae_sim.errors import InvalidArgumentError, OutOfRangeError
from ae_sim.exposure import (
    build_ladder,
    ev_relative,
    ev_span,
    expand_stack,
    interpolate_exposure,
    nearest_index,
)

from conftest import constant_raw, make_raw

FULL_SPAN_EV = math.log2(7500)  # 15 / (1/500)


def test_build_ladder_reference_range():
    ladder = build_ladder(1 / 500, 15.0, 40)
    assert ladder.n_levels == 40
    assert abs(ev_span(ladder) - FULL_SPAN_EV) < 1e-9
    assert abs(ladder.spacing_ev - FULL_SPAN_EV / 39) < 1e-9
    assert ladder.speeds[0] == 1 / 500 and ladder.speeds[-1] == 15.0


def test_build_ladder_two_levels():
    ladder = build_ladder(1.0, 2.0, 2)
    assert np.allclose(ladder.speeds, [1.0, 2.0])


def test_build_ladder_15_levels():
    ladder = build_ladder(1 / 500, 15.0, 15)
    assert abs(ladder.spacing_ev - FULL_SPAN_EV / 14) < 1e-9


@pytest.mark.parametrize("args", [(0.0, 1.0, 5), (-1.0, 1.0, 5), (1.0, 1.0, 5), (2.0, 1.0, 5), (0.1, 1.0, 1)])
def test_build_ladder_rejects(args):
    with pytest.raises(InvalidArgumentError):
        build_ladder(*args)


def test_spacing_uniform_to_1e9():
    rng = np.random.default_rng(0)
    for _ in range(20):
        t0 = float(rng.uniform(1e-4, 0.1))
        t1 = t0 * float(rng.uniform(4.0, 5000.0))
        n = int(rng.integers(2, 80))
        gaps = np.diff(np.log2(build_ladder(t0, t1, n).speeds))
        assert gaps.max() - gaps.min() < 1e-9


def test_ev_relative_antisymmetric():
    rng = np.random.default_rng(1)
    for _ in range(50):
        a, b = rng.uniform(1e-3, 20.0, size=2)
        assert abs(ev_relative(a, b) + ev_relative(b, a)) < 1e-12
    assert ev_span(build_ladder(1.0, 8.0, 4)) == pytest.approx(3.0)


def test_nearest_index_one_second(reference_ladder):
    # continuous position log2(500)/spacing = 27.16
    assert nearest_index(reference_ladder, 1.0) == 27


def test_nearest_index_members_idempotent(reference_ladder):
    for i, s in enumerate(reference_ladder.speeds):
        assert nearest_index(reference_ladder, float(s)) == i


def test_nearest_index_clamps(reference_ladder):
    assert nearest_index(reference_ladder, 1000.0) == 39
    assert nearest_index(reference_ladder, 1e-9) == 0


def test_nearest_index_tie_breaks_low(reference_ladder):
    # 2.0 is exactly the EV midpoint of the [1, 4] ladder (log2 exact on powers of two)
    assert nearest_index(build_ladder(1.0, 4.0, 2), 2.0) == 0
    assert nearest_index(build_ladder(1.0, 16.0, 3), 2.0) == 0
    with pytest.raises(InvalidArgumentError):
        nearest_index(reference_ladder, 0.0)


def test_interpolate_midpoint():
    pairs = [(1.0, constant_raw(0.1)), (3.0, constant_raw(0.3))]
    out = interpolate_exposure(pairs, 2.0)
    assert np.allclose(out.pixels, 0.2)


def test_interpolate_identity_bit_exact():
    img = make_raw(np.random.default_rng(2).random((6, 9)))
    pairs = [(0.5, constant_raw(0.05)), (1.0, img), (2.0, constant_raw(0.9))]
    out = interpolate_exposure(pairs, 1.0)
    assert np.array_equal(out.pixels, img.pixels)


def test_interpolate_through_saturated_neighbor():
    pairs = [(1.0, constant_raw(0.9)), (3.0, constant_raw(1.0))]
    out = interpolate_exposure(pairs, 2.0)
    assert np.allclose(out.pixels, 0.95)


def test_interpolate_rejects_extrapolation():
    pairs = [(1.0, constant_raw(0.1)), (3.0, constant_raw(0.3))]
    with pytest.raises(OutOfRangeError):
        interpolate_exposure(pairs, 4.0)
    with pytest.raises(OutOfRangeError):
        interpolate_exposure(pairs, 0.5)
    with pytest.raises(InvalidArgumentError):
        interpolate_exposure(pairs[:1], 1.0)


def test_interpolation_exact_on_linear_data():
    # captured pixels follow v = min(1, r*t) exactly (no quantization)
    rng = np.random.default_rng(3)
    rates = rng.uniform(0.05, 0.6, size=(5, 7, 3))
    times = [0.2, 0.5, 0.9, 1.7, 2.5]
    pairs = [(t, make_raw(np.minimum(1.0, rates * t))) for t in times]
    # linear regime = unsaturated at every captured neighbor of the bracket
    mask = rates * times[-1] < 1.0
    for target in (0.3, 0.77, 1.0, 2.1):
        out = interpolate_exposure(pairs, target)
        expected = rates * target
        assert np.abs(out.pixels - expected)[mask].max() < 1e-9


def test_expand_stack_15_levels_to_40(reference_ladder):
    rng = np.random.default_rng(4)
    rates = rng.uniform(0.05, 0.5, size=(4, 6, 3))
    captured_idx = sorted({int(round(p)) for p in np.linspace(0, 39, 15)})
    assert len(captured_idx) == 15
    captured = [(float(reference_ladder.speeds[i]), make_raw(np.minimum(1.0, rates * reference_ladder.speeds[i])))
                for i in captured_idx]
    stack = expand_stack(captured, reference_ladder)
    assert len(stack.images) == 40
    assert stack.captured_mask.sum() == 15
    assert [i for i in range(40) if stack.captured_mask[i]] == captured_idx
    for i in captured_idx:
        assert np.array_equal(stack.images[i].pixels, captured[captured_idx.index(i)][1].pixels)


def test_expand_stack_full_ladder_copies(tiny_ladder):
    captured = [(float(s), constant_raw(0.1 * (i + 1))) for i, s in enumerate(tiny_ladder.speeds)]
    stack = expand_stack(captured, tiny_ladder)
    assert stack.captured_mask.all()
    for i in range(5):
        assert np.array_equal(stack.images[i].pixels, captured[i][1].pixels)


def test_expand_stack_hand_computed_blend():
    ladder = build_ladder(1.0, 4.0, 5)  # speeds 1, sqrt2, 2, 2*sqrt2, 4
    a = make_raw(np.array([[0.1, 0.2], [0.3, 0.4]]))
    b = make_raw(np.array([[0.2, 0.4], [0.6, 0.8]]))
    c = make_raw(np.array([[0.4, 0.8], [1.0, 1.0]]))
    stack = expand_stack([(1.0, a), (2.0, b), (4.0, c)], ladder)
    assert list(stack.captured_mask) == [True, False, True, False, True]
    w1 = (math.sqrt(2.0) - 1.0) / 1.0
    assert np.allclose(stack.images[1].pixels, a.pixels + w1 * (b.pixels - a.pixels))
    w3 = (2.0 * math.sqrt(2.0) - 2.0) / 2.0
    assert np.allclose(stack.images[3].pixels, b.pixels + w3 * (c.pixels - b.pixels))


def test_expand_stack_requires_spanning(tiny_ladder):
    captured = [(float(tiny_ladder.speeds[1]), constant_raw(0.1)),
                (float(tiny_ladder.speeds[3]), constant_raw(0.3))]
    with pytest.raises(InvalidArgumentError):
        expand_stack(captured, tiny_ladder)


def test_expand_stack_monotone_for_unsaturated(tiny_ladder):
    rng = np.random.default_rng(5)
    rates = rng.uniform(0.1, 0.9, size=(5, 5, 3))
    captured = [(float(s), make_raw(np.minimum(1.0, rates * s))) for s in tiny_ladder.speeds[::2]]
    stack = expand_stack(captured, tiny_ladder)
    values = np.stack([img.pixels for img in stack.images])
    unsaturated = rates * tiny_ladder.t_max < 1.0
    diffs = np.diff(values, axis=0)
    assert diffs[:, unsaturated].min() >= -1e-12
