"""The JIT lane and the numpy lane must be numerically interchangeable."""

import numpy as np
import pytest

from bendrop import _accel


@pytest.fixture
def restore_lane():
    before = _accel.using_numba()
    yield
    _accel.set_lane(before)


def _both_lanes(fn):
    """Run fn() under each lane, return the pair of results."""
    if not _accel.HAS_NUMBA:
        pytest.skip("numba unavailable; single-lane build")
    _accel.set_lane(True)
    fast = fn()
    _accel.set_lane(False)
    slow = fn()
    return fast, slow


def test_pairwise_power_lane_parity(restore_lane):
    rng = np.random.default_rng(3)
    pts = rng.normal(size=(120, 3))
    fast, slow = _both_lanes(lambda: _accel.pairwise_power(pts, 1.3))
    assert np.array_equal(np.diag(fast), np.zeros(len(pts)))
    np.testing.assert_allclose(fast, slow, rtol=1e-13, atol=1e-13)


def test_pairwise_power_matches_direct():
    rng = np.random.default_rng(5)
    pts = rng.normal(size=(40, 3))
    K = _accel.pairwise_power(pts, 0.7)
    diff = pts[:, None, :] - pts[None, :, :]
    direct = np.linalg.norm(diff, axis=-1)
    np.fill_diagonal(direct, 1.0)
    direct = direct**-0.7
    np.fill_diagonal(direct, 0.0)
    np.testing.assert_allclose(K, direct, rtol=1e-12)


def test_surface_correction_lane_parity(restore_lane):
    rng = np.random.default_rng(11)
    pts = rng.normal(size=(60, 3))
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    normals = pts.copy()
    radii = np.full(60, 0.35)

    def run():
        K = _accel.pairwise_power(pts, 1.0)
        return _accel.correct_surface_pairs(K.copy(), pts, normals, radii, 1.0)

    fast, slow = _both_lanes(run)
    np.testing.assert_allclose(fast, slow, rtol=1e-12, atol=1e-12)


def test_curve_correction_lane_parity(restore_lane):
    rng = np.random.default_rng(12)
    t = np.sort(rng.uniform(0, 2 * np.pi, size=50))
    pts = np.stack([np.cos(t), np.sin(t)], axis=1)
    tangents = np.stack([-np.sin(t), np.cos(t)], axis=1)
    half = np.full(50, 0.06)

    def run():
        K = _accel.pairwise_power(pts, 0.5)
        return _accel.correct_curve_pairs(K.copy(), pts, tangents, half, 0.5)

    fast, slow = _both_lanes(run)
    np.testing.assert_allclose(fast, slow, rtol=1e-12, atol=1e-12)


def test_point_synth_lane_parity(restore_lane):
    rng = np.random.default_rng(7)
    lmax = 9
    C = rng.normal(size=(lmax + 1, lmax + 1))
    S = rng.normal(size=(lmax + 1, lmax + 1))
    theta = rng.uniform(0.05, np.pi - 0.05, size=200)
    phi = rng.uniform(0, 2 * np.pi, size=200)
    fast, slow = _both_lanes(lambda: _accel.point_synth(C, S, theta, phi))
    np.testing.assert_allclose(fast, slow, rtol=5e-13, atol=5e-13)


def test_set_lane_is_sticky_and_reversible(restore_lane):
    if not _accel.HAS_NUMBA:
        pytest.skip("numba unavailable; single-lane build")
    _accel.set_lane(False)
    assert not _accel.using_numba()
    _accel.set_lane(True)
    assert _accel.using_numba()
