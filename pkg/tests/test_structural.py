import math

import numpy as np
import pytest

from mmcm import (
    DepthMap,
    depth_entropy,
    discontinuity_ratio,
    sobel_gradients,
    structural_metrics,
)
from mmcm.errors import InvalidBinCount, InvalidTau

import reference as ref


def dmap(values):
    return DepthMap(np.asarray(values, dtype=np.float64))


STEP_COLUMNS = np.tile(np.array([0.0, 0.0, 1.0, 1.0]), (4, 1))


def test_entropy_constant_map_is_zero():
    assert depth_entropy(dmap(np.full((3, 5), 7.25))) == 0.0


def test_entropy_two_values():
    assert depth_entropy(dmap([[0.0, 1.0]])) == pytest.approx(math.log(2), abs=1e-12)


def test_entropy_one_sample_per_bin():
    values = np.array([[i / 255 for i in range(256)]])
    assert depth_entropy(dmap(values), bins=256) == pytest.approx(math.log(256), abs=1e-12)


def test_entropy_matches_reference(rng):
    for _ in range(10):
        h, w = rng.integers(1, 33, 2)
        values = rng.normal(0, 10, (h, w))
        for bins in (2, 16, 256):
            ours = depth_entropy(dmap(values), bins)
            assert ours == pytest.approx(ref.naive_entropy(values.tolist(), bins), abs=1e-9)
            assert 0.0 <= ours <= math.log(bins) + 1e-12


def test_entropy_invalid_bins():
    with pytest.raises(InvalidBinCount):
        depth_entropy(dmap([[1.0]]), bins=0)


def test_sobel_constant_map():
    field = sobel_gradients(dmap(np.full((4, 6), 3.5)))
    assert np.all(field.gx == 0) and np.all(field.gy == 0) and np.all(field.magnitude == 0)


def test_sobel_step_columns():
    field = sobel_gradients(dmap(STEP_COLUMNS))
    expected_gx = np.tile(np.array([0.0, 4.0, 4.0, 0.0]), (4, 1))
    assert np.array_equal(field.gx, expected_gx)
    assert np.all(field.gy == 0)
    assert np.array_equal(field.magnitude, expected_gx)


def test_sobel_transpose_swaps_roles():
    field = sobel_gradients(dmap(STEP_COLUMNS))
    field_t = sobel_gradients(dmap(STEP_COLUMNS.T))
    assert np.array_equal(field_t.gy, field.gx.T)
    assert np.array_equal(field_t.gx, field.gy.T)
    assert np.array_equal(field_t.magnitude, field.magnitude.T)


def test_sobel_single_row_and_column():
    row = sobel_gradients(dmap([[1.0, 2.0, 4.0]]))
    assert np.all(row.gy == 0)
    col = sobel_gradients(dmap([[1.0], [2.0], [4.0]]))
    assert np.all(col.gx == 0)
    assert sobel_gradients(dmap([[5.0]])).magnitude.item() == 0.0


def test_sobel_matches_reference(rng):
    for _ in range(10):
        h, w = rng.integers(1, 33, 2)
        values = rng.normal(0, 10, (h, w))
        field = sobel_gradients(dmap(values))
        ogx, ogy, omag = ref.naive_sobel(values.tolist())
        assert np.allclose(field.gx, ogx, atol=1e-9)
        assert np.allclose(field.gy, ogy, atol=1e-9)
        assert np.allclose(field.magnitude, omag, atol=1e-9)
        assert np.allclose(field.magnitude, np.sqrt(field.gx**2 + field.gy**2), atol=1e-9)


def test_ratio_constant_map():
    assert discontinuity_ratio(dmap(np.full((5, 5), 2.0)), 0.1) == 0.0


def test_ratio_step_columns():
    # threshold 0.1 * range(1); the 8 middle-column pixels carry magnitude 4
    assert discontinuity_ratio(dmap(STEP_COLUMNS), 0.1) == 0.5
    assert discontinuity_ratio(dmap(STEP_COLUMNS), 5.0) == 0.0


def test_ratio_monotone_in_tau(rng):
    values = rng.normal(0, 3, (12, 9))
    taus = [0.01, 0.05, 0.1, 0.5, 1.0, 4.0]
    ratios = [discontinuity_ratio(dmap(values), t) for t in taus]
    assert all(a >= b for a, b in zip(ratios, ratios[1:]))


def test_ratio_invalid_tau():
    with pytest.raises(InvalidTau):
        discontinuity_ratio(dmap([[1.0]]), 0.0)
    with pytest.raises(InvalidTau):
        discontinuity_ratio(dmap([[1.0]]), -0.5)


def test_ratio_matches_reference(rng):
    for _ in range(10):
        h, w = rng.integers(2, 33, 2)
        values = rng.normal(0, 10, (h, w))
        ours = discontinuity_ratio(dmap(values), 0.1)
        assert ours == pytest.approx(ref.naive_discontinuity_ratio(values.tolist(), 0.1), abs=1e-9)


def test_structural_metrics_constant():
    result = structural_metrics(dmap(np.full((2, 3), 7.0)), bins=256, tau=0.1, frame_id="f0")
    assert result.depth_entropy == 0.0
    assert result.depth_mean == 7.0
    assert result.depth_min == 7.0
    assert result.depth_max == 7.0
    assert result.discontinuity_ratio == 0.0
    assert result.bin_count == 256 and result.tau == 0.1 and result.frame_id == "f0"


def test_structural_metrics_two_value_map():
    result = structural_metrics(dmap([[0.0, 1.0]]), bins=2, tau=0.1)
    assert result.depth_entropy == pytest.approx(math.log(2), abs=1e-12)
    assert result.depth_mean == 0.5


def test_structural_metrics_invariants(rng):
    for _ in range(10):
        h, w = rng.integers(1, 20, 2)
        result = structural_metrics(dmap(rng.normal(0, 5, (h, w))), bins=64, tau=0.2)
        assert 0.0 <= result.depth_entropy <= math.log(64) + 1e-12
        assert 0.0 <= result.discontinuity_ratio <= 1.0
        assert result.depth_min <= result.depth_mean <= result.depth_max


def test_affine_invariance_exact_arithmetic():
    # eighth-integer values with power-of-two scales keep every intermediate
    # exact, so the metrics must match exactly, not just within tolerance
    base = np.array([[0.125, 2.0, -1.5], [4.25, 0.0, 3.875], [-2.625, 1.0, 0.5]])
    for a in (0.5, 2.0, 4.0):
        for b in (-3.0, 0.0, 1.25):
            scaled = dmap(a * base + b)
            assert depth_entropy(scaled, 16) == depth_entropy(dmap(base), 16)
            assert discontinuity_ratio(scaled, 0.1) == discontinuity_ratio(dmap(base), 0.1)
            mean = structural_metrics(scaled).depth_mean
            assert mean == pytest.approx(a * base.mean() + b, abs=1e-12)
