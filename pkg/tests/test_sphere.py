"""Spherical grids, harmonic transforms and surface measures.

The reference values come from tests/oracles.py: complex-step/FD
differential geometry on dense Gauss grids, and scipy's spherical
harmonics. The library route is spectral synthesis, so agreement is a
genuine two-route check.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from bendrop import (
    ShapeError,
    SphereField,
    area,
    bending_energies,
    c1_norm,
    gauss_bonnet_defect,
    get_grid,
    li_yau_margin,
    random_band_field,
    rotate_field,
    surface_from_field,
    volume,
)


def rotation(axis, angle):
    axis = np.asarray(axis, dtype=float)
    axis /= np.linalg.norm(axis)
    K = np.array(
        [
            [0, -axis[2], axis[1]],
            [axis[2], 0, -axis[0]],
            [-axis[1], axis[0], 0],
        ]
    )
    return np.eye(3) + math.sin(angle) * K + (1 - math.cos(angle)) * (K @ K)


# a sphere-smooth radius: polynomial in the Cartesian coordinates
def poly_radius(t, p):
    x = np.sin(t) * np.cos(p)
    y = np.sin(t) * np.sin(p)
    z = np.cos(t)
    return 1.0 + 0.08 * z * z + 0.05 * (x * x - y * y) + 0.06 * x * y * z + 0.04 * x * z


def field_from_function(fn, band_limit=16):
    grid = get_grid(band_limit)
    T, P = np.meshgrid(grid.theta, grid.phi, indexing="ij")
    return SphereField.from_values(grid, fn(T, P) - 1.0)


# --- grid and transform ---------------------------------------------------


def test_quadrature_integrates_constants():
    grid = get_grid(12)
    assert abs(grid.integrate(np.ones((grid.n_theta, grid.n_phi))) - 4 * math.pi) < 1e-12


def test_quadrature_kills_pure_harmonics():
    grid = get_grid(10)
    for ell, m in [(1, 0), (2, 2), (5, -3), (9, 9)]:
        f = SphereField.zero(grid).with_coefficient(ell, m, 1.0)
        assert abs(grid.integrate(f.values())) < 1e-12


@given(
    ell=st.integers(min_value=0, max_value=10),
    m=st.integers(min_value=-10, max_value=10),
    amp=st.floats(min_value=-3.0, max_value=3.0, allow_nan=False),
)
@settings(max_examples=40, deadline=None)
def test_analyze_synthesize_roundtrip(ell, m, amp):
    if abs(m) > ell:
        m = ell if m > 0 else -ell
    grid = get_grid(12)
    f = SphereField.zero(grid).with_coefficient(ell, m, amp)
    g = SphereField.from_values(grid, f.values())
    np.testing.assert_allclose(g.coeffs, f.coeffs, atol=1e-12)


def test_basis_matches_scipy():
    grid = get_grid(14)
    T, P = np.meshgrid(grid.theta, grid.phi, indexing="ij")
    for ell, m in [(0, 0), (1, 1), (2, -2), (3, 0), (6, 4), (9, -7), (13, 13)]:
        f = SphereField.zero(grid).with_coefficient(ell, m, 1.0)
        ref = oracles.real_sph_harm(ell, m, T, P)
        np.testing.assert_allclose(f.values(), ref, atol=5e-13)


def test_basis_is_orthonormal():
    grid = get_grid(8)
    pairs = [(0, 0), (1, -1), (2, 1), (4, -3), (6, 6)]
    for i, (l1, m1) in enumerate(pairs):
        f1 = SphereField.zero(grid).with_coefficient(l1, m1, 1.0).values()
        for l2, m2 in pairs[i:]:
            f2 = SphereField.zero(grid).with_coefficient(l2, m2, 1.0).values()
            ip = grid.integrate(f1 * f2)
            expected = 1.0 if (l1, m1) == (l2, m2) else 0.0
            assert abs(ip - expected) < 1e-12


def test_constant_field_coefficient():
    grid = get_grid(6)
    f = SphereField.from_values(grid, np.ones((grid.n_theta, grid.n_phi)))
    assert abs(f.coefficient(0, 0) - math.sqrt(4 * math.pi)) < 1e-12


def test_pad_to_finer_grid_preserves_function():
    coarse = get_grid(6)
    fine = get_grid(13)
    rng = np.random.default_rng(2)
    f = random_band_field(coarse, rng, degree_max=5, amplitude=0.2)
    g = f.pad_to(fine)
    assert abs(coarse.integrate(f.values() ** 2) - fine.integrate(g.values() ** 2)) < 1e-12
    # same surface evaluated at two quadrature resolutions
    assert abs(area(surface_from_field(f)) - area(surface_from_field(g))) < 1e-8


# --- measures against the independent oracle ------------------------------


@pytest.fixture(scope="module")
def poly_reference():
    return oracles.surface_measures_reference(poly_radius, 256, 256)


@pytest.fixture(scope="module")
def poly_geom():
    return surface_from_field(field_from_function(poly_radius))


def test_sphere_identities_are_exact():
    geom = surface_from_field(SphereField.zero(get_grid(16)))
    be = bending_energies(geom)
    assert abs(area(geom) - 4 * math.pi) < 1e-10
    assert abs(volume(geom) - 4 * math.pi / 3) < 1e-10
    assert abs(0.25 * be["h_squared"] - 4 * math.pi) < 1e-9
    assert abs(be["second_form_squared"] - 8 * math.pi) < 1e-8
    assert abs(be["traceless_squared"]) < 1e-10


def test_area_volume_match_oracle(poly_reference, poly_geom):
    assert abs(area(poly_geom) - poly_reference["area"]) < 1e-9
    assert abs(volume(poly_geom) - poly_reference["volume"]) < 1e-9


def test_bending_matches_oracle(poly_reference, poly_geom):
    be = bending_energies(poly_geom)
    w_lib = 0.25 * be["h_squared"]
    assert abs(w_lib - poly_reference["willmore"]) < 3e-7 * poly_reference["willmore"]
    assert (
        abs(be["second_form_squared"] - poly_reference["second_form_squared"])
        < 3e-7 * poly_reference["second_form_squared"]
    )


def test_gauss_bonnet_defect_vanishes(poly_geom):
    assert abs(gauss_bonnet_defect(poly_geom)) < 1e-10


def test_li_yau_margin_positive_for_graphs(poly_geom):
    assert li_yau_margin(poly_geom) > 0.0


def test_dilation_scaling_of_measures():
    f = field_from_function(poly_radius)
    lam = 1.37
    g1 = surface_from_field(f, radius=1.0)
    g2 = surface_from_field(f, radius=lam)
    assert abs(area(g2) - lam**2 * area(g1)) < 1e-9 * area(g1)
    assert abs(volume(g2) - lam**3 * volume(g1)) < 1e-9 * volume(g1)
    be1 = bending_energies(g1)
    be2 = bending_energies(g2)
    # bending is scale-invariant
    assert abs(be2["h_squared"] - be1["h_squared"]) < 1e-8 * be1["h_squared"]


@given(seed=st.integers(min_value=0, max_value=10_000))
@settings(max_examples=15, deadline=None)
def test_rotation_invariance_of_measures(seed):
    rng = np.random.default_rng(seed)
    grid = get_grid(10)
    f = random_band_field(grid, rng, degree_max=4, amplitude=0.15)
    rot = rotation(rng.normal(size=3), rng.uniform(0, 2 * math.pi))
    g = rotate_field(f, rot)
    ga, gb = surface_from_field(f), surface_from_field(g)
    assert abs(area(ga) - area(gb)) < 1e-8
    assert abs(volume(ga) - volume(gb)) < 1e-8
    assert (
        abs(bending_energies(ga)["h_squared"] - bending_energies(gb)["h_squared"])
        < 1e-6
    )


def test_rotation_preserves_degree_content():
    rng = np.random.default_rng(8)
    grid = get_grid(10)
    f = SphereField.zero(grid).with_coefficient(3, 2, 0.7).with_coefficient(3, -1, 0.2)
    rot = rotation([0.3, -1.0, 0.5], 1.1)
    g = rotate_field(f, rot)
    norms_f = f.degree_norms()
    norms_g = g.degree_norms()
    np.testing.assert_allclose(norms_f, norms_g, atol=1e-12)


# --- guards and norms ------------------------------------------------------


def test_collapsed_graph_is_rejected():
    grid = get_grid(8)
    f = SphereField.zero(grid).with_coefficient(0, 0, -3.6)  # 1 + phi < 0.05
    with pytest.raises(ShapeError):
        surface_from_field(f)


def test_negative_radius_rejected():
    with pytest.raises(ShapeError):
        surface_from_field(SphereField.zero(get_grid(4)), radius=-1.0)


def test_c1_norm_of_known_field():
    grid = get_grid(12)
    # phi = a * cos(theta) = a * sqrt(3/(4 pi)) normalized harmonic
    a = 0.2
    f = SphereField.zero(grid).with_coefficient(1, 0, a / math.sqrt(3 / (4 * math.pi)))
    # analytic value: sup|phi| + sup|grad phi| = a + a; the sampled sup sits
    # slightly below it because the Gauss nodes exclude the poles
    assert 2 * a * 0.96 <= c1_norm(f) <= 2 * a + 1e-12


def test_random_band_field_respects_norm_budget():
    grid = get_grid(12)
    for seed in range(8):
        rng = np.random.default_rng(seed)
        f = random_band_field(grid, rng, degree_max=6, amplitude=0.3, norm="sup")
        assert np.abs(f.values()).max() <= 0.3 + 1e-9
        g = random_band_field(grid, rng, degree_max=6, amplitude=0.2, norm="c1")
        assert c1_norm(g) <= 0.2 + 1e-9


def test_random_band_field_has_no_low_degrees():
    grid = get_grid(10)
    f = random_band_field(grid, np.random.default_rng(0), degree_max=5, amplitude=0.1)
    norms = f.degree_norms()
    assert norms[0] == 0.0  # no volume-mode constant term
    assert norms.shape[0] >= 6
