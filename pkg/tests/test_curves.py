"""Planar star-shaped curves: trigonometric graphs and their measures."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from bendrop import (
    CurveShape,
    UsageError,
    curve_c1_norm,
    curve_measures,
    random_curve,
)
from bendrop.curves import curve_nodes, rotate_curve


def trig_shape(fn, degree=10, n_samples=4096):
    """Shape with radius fn(t); from_samples takes the deviation rho = fn - 1."""
    probe = CurveShape.circle(1.0, degree=degree, n_samples=n_samples)
    return CurveShape.from_samples(fn(probe.thetas()) - 1.0, degree=degree)


def test_circle_measures_are_exact():
    m = curve_measures(CurveShape.circle(2.0))
    assert abs(m["length"] - 4 * math.pi) < 1e-12
    assert abs(m["area"] - 4 * math.pi) < 1e-12
    assert abs(m["elastic"] - math.pi) < 1e-12  # int (1/2)^2 over length 4 pi


def test_measures_match_fd_oracle():
    def rfn(t):
        return 1.0 + 0.15 * np.cos(2 * t) + 0.07 * np.sin(3 * t) - 0.04 * np.cos(5 * t)

    ref = oracles.curve_measures_reference(rfn)
    m = curve_measures(trig_shape(rfn))
    assert abs(m["length"] - ref["length"]) < 1e-9 * ref["length"]
    assert abs(m["area"] - ref["area"]) < 1e-9 * ref["area"]
    assert abs(m["elastic"] - ref["elastic"]) < 1e-6 * ref["elastic"]


def test_turning_number_is_one():
    def rfn(t):
        return 1.0 + 0.2 * np.cos(3 * t)

    ref = oracles.curve_measures_reference(rfn)
    assert abs(ref["turning"] - 2 * math.pi) < 1e-6
    m = curve_measures(trig_shape(rfn))
    w = 2 * math.pi / len(m["curvature"])
    lib_turning = float(np.sum(m["curvature"] * m["speed"]) * w)
    assert abs(lib_turning - 2 * math.pi) < 1e-10


def test_elastic_energy_scaling():
    # kappa ~ 1/R, ds ~ R: elastic energy of a dilated curve scales as 1/lam
    base = trig_shape(lambda t: 1.0 + 0.1 * np.cos(2 * t))
    lam = 1.9
    scaled = CurveShape(
        degree=base.degree,
        coeffs=base.coeffs,
        base_radius=base.base_radius * lam,
        n_samples=base.n_samples,
    )
    m1 = curve_measures(base)
    m2 = curve_measures(scaled)
    assert abs(m2["elastic"] - m1["elastic"] / lam) < 1e-10
    assert abs(m2["length"] - m1["length"] * lam) < 1e-10
    assert abs(m2["area"] - m1["area"] * lam**2) < 1e-9


@given(seed=st.integers(min_value=0, max_value=5000))
@settings(max_examples=20, deadline=None)
def test_rotation_invariance(seed):
    rng = np.random.default_rng(seed)
    shape = random_curve(rng, degree_max=5, amplitude=0.2, degree=12, n_samples=512)
    angle = rng.uniform(0, 2 * math.pi)
    rotated = rotate_curve(shape, angle)
    m1, m2 = curve_measures(shape), curve_measures(rotated)
    assert abs(m1["length"] - m2["length"]) < 1e-9
    assert abs(m1["area"] - m2["area"]) < 1e-9
    assert abs(m1["elastic"] - m2["elastic"]) < 1e-7


def test_from_samples_roundtrip():
    rng = np.random.default_rng(4)
    shape = random_curve(rng, degree_max=6, amplitude=0.25, degree=9, n_samples=256)
    rebuilt = CurveShape.from_samples(shape.values(), degree=9)
    np.testing.assert_allclose(rebuilt.coeffs, shape.coeffs, atol=1e-12)


def test_deviation_convention():
    # values() returns the deviation rho; the radius is base * (1 + rho)
    sh = trig_shape(lambda t: 1.0 + 0.1 * np.cos(4 * t), degree=6)
    np.testing.assert_allclose(sh.values(), 0.1 * np.cos(4 * sh.thetas()), atol=1e-12)


def test_degree_norms_flag_content():
    shape = trig_shape(lambda t: 1.0 + 0.1 * np.cos(4 * t), degree=8)
    norms = shape.degree_norms()
    assert norms[4] > 0.05
    for k in (1, 2, 3, 5, 6, 7, 8):
        assert norms[k] < 1e-12


def test_c1_norm_bounds_known_curve():
    # r = 1 + a cos(kt): sup|r-1| = a, sup|r'| = a k
    a, k = 0.05, 3
    shape = trig_shape(lambda t: 1.0 + a * np.cos(k * t), degree=6)
    norm = curve_c1_norm(shape)
    assert a + a * k - 1e-6 <= norm <= a + a * k + 1e-6


def test_curve_nodes_weights_sum_to_length():
    shape = trig_shape(lambda t: 1.0 + 0.2 * np.cos(2 * t))
    pts, tangents, weights = curve_nodes(shape, 512)
    assert abs(weights.sum() - curve_measures(shape)["length"]) < 1e-9
    np.testing.assert_allclose(np.linalg.norm(tangents, axis=1), 1.0, atol=1e-12)


def test_too_few_nodes_rejected():
    shape = CurveShape.circle(1.0, degree=16, n_samples=128)
    with pytest.raises(UsageError):
        curve_nodes(shape, 8)


def test_random_curve_respects_norms():
    for seed in range(6):
        rng = np.random.default_rng(seed)
        shape = random_curve(rng, degree_max=4, amplitude=0.2, degree=8, norm="c1")
        assert curve_c1_norm(shape) <= 0.2 + 1e-9
        shape2 = random_curve(rng, degree_max=4, amplitude=0.2, degree=8, norm="sup")
        assert np.abs(shape2.values()).max() <= 0.2 + 1e-9
