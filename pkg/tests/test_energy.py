"""Combined energy: perimeter + bending + capacitary + volume penalty."""

import math

import numpy as np
import pytest

from bendrop import (
    CurveShape,
    ModelParams,
    SphereField,
    UsageError,
    evaluate,
    genus_zero_energy_gap,
    get_grid,
    params_for_mass,
    random_band_field,
    threshold_diagnostics,
)


def ball_breakdown(charge=0.0, alpha=2.0, eta=0.0, band=12, **kw):
    params = ModelParams(dimension=3, alpha=alpha, eta=eta, charge=charge, **kw)
    return evaluate(SphereField.zero(get_grid(band)), params)


def test_ball_composition():
    b = ball_breakdown()
    assert abs(b.perimeter - 4 * math.pi) < 1e-10
    assert abs(b.willmore - 4 * math.pi) < 1e-9
    assert abs(b.volume - 4 * math.pi / 3) < 1e-10
    assert b.capacitary == 0.0
    assert abs(b.total_model - (b.perimeter + b.willmore)) < 1e-12
    # relaxed: (1/4) int |A|^2 + penalty * |vol - target| = 2 pi at the ball
    assert abs(b.total_relaxed - 2 * math.pi) < 1e-9


def test_genus_zero_gap_vanishes():
    # W - (1/4) int |A|^2 - 2 pi is identically zero on genus-0 graphs, so
    # the reported gap is pure quadrature error
    b = ball_breakdown()
    assert abs(genus_zero_energy_gap(b)) < 1e-9
    rng = np.random.default_rng(1)
    f = random_band_field(get_grid(10), rng, degree_max=4, amplitude=0.15)
    b2 = evaluate(f, ModelParams(dimension=3, alpha=2.0))
    assert abs(genus_zero_energy_gap(b2)) < 1e-8


def test_charged_ball_value():
    q = 0.3
    b = ball_breakdown(charge=q, band=8)
    # I_2(unit sphere) = 1: capacitary = q^2 within panel accuracy
    assert abs(b.capacitary - q * q) < 0.01 * q * q
    assert abs(b.total_model - (b.perimeter + b.willmore + b.capacitary)) < 1e-12


def test_breakdown_as_dict_roundtrip():
    b = ball_breakdown(charge=0.1, band=6)
    d = b.as_dict()
    assert d["perimeter"] == b.perimeter
    assert d["total_relaxed"] == b.total_relaxed
    assert d["dimension"] == 3
    assert isinstance(d["n_panels"], int)


def test_lambda_weight_scales_perimeter_term():
    b1 = ball_breakdown(lambda_perimeter=1.0)
    b2 = ball_breakdown(lambda_perimeter=2.5)
    assert abs(b2.total_model - b1.total_model - 1.5 * b1.perimeter) < 1e-9


def test_circle_composition():
    params = ModelParams(dimension=2, alpha=1.5, charge=0.2)
    b = evaluate(CurveShape.circle(1.0), params)
    assert abs(b.perimeter - 2 * math.pi) < 1e-10
    assert abs(b.willmore - 2 * math.pi) < 1e-10
    assert abs(b.volume - math.pi) < 1e-10
    assert b.capacitary > 0.0
    assert abs(b.total_model - (b.perimeter + b.willmore + b.capacitary)) < 1e-12


def test_volume_penalty_activates_off_target():
    params = ModelParams(
        dimension=3, alpha=2.0, target_volume=4 * math.pi / 3, penalty=7.0
    )
    grown = SphereField.zero(get_grid(8)).with_coefficient(
        0, 0, 0.1 * math.sqrt(4 * math.pi)
    )
    b = evaluate(grown, params)
    expected = 7.0 * abs(b.volume - 4 * math.pi / 3)
    assert abs(b.volume_penalty - expected) < 1e-12
    assert b.volume_penalty > 0.1


def test_default_penalty_floor():
    assert ModelParams(dimension=3, alpha=2.0, charge=0.0).effective_penalty() == 1.0
    assert ModelParams(dimension=3, alpha=2.0, charge=2.0).effective_penalty() == 40.0


def test_default_target_volume_is_unit_ball():
    p3 = ModelParams(dimension=3, alpha=2.0)
    p2 = ModelParams(dimension=2, alpha=1.5)
    assert abs(p3.effective_target() - 4 * math.pi / 3) < 1e-15
    assert abs(p2.effective_target() - math.pi) < 1e-15


def test_dilation_identity_of_capacitary_term():
    # eta = 0: evaluating the dilated ball multiplies the interaction by
    # lam^(alpha - 3) exactly (same panel layout, scaled)
    params = ModelParams(dimension=3, alpha=2.0, charge=0.2)
    base = evaluate(SphereField.zero(get_grid(8)), params)
    lam = 1.4
    scaled = evaluate(SphereField.zero(get_grid(8)), params, radius=lam)
    ratio = scaled.interaction_value / base.interaction_value
    assert abs(ratio - lam ** (params.alpha - 3.0)) < 1e-10


def test_bending_scale_invariance_3d():
    params = ModelParams(dimension=3, alpha=2.0)
    base = evaluate(SphereField.zero(get_grid(8)), params)
    scaled = evaluate(SphereField.zero(get_grid(8)), params, radius=2.1)
    assert abs(scaled.willmore - base.willmore) < 1e-9


def test_invalid_dimension_rejected():
    with pytest.raises(UsageError):
        ModelParams(dimension=4, alpha=2.0)


def test_shape_dimension_must_match_params():
    params = ModelParams(dimension=2, alpha=1.5)
    with pytest.raises(UsageError):
        evaluate(SphereField.zero(get_grid(6)), params)


def test_params_for_mass_3d_keeps_unit_shape():
    params = ModelParams(dimension=3, alpha=2.0, charge=0.5)
    rescaled = params_for_mass(params, 4 * math.pi / 3)
    assert abs(rescaled.charge - params.charge) < 1e-14


def test_params_for_mass_charge_exponents():
    # 3D: charge factor (m/m0)^((3-alpha)/6); 2D: (m/m0)^((1-alpha)/4)
    p3 = ModelParams(dimension=3, alpha=2.0, charge=1.0)
    r3 = params_for_mass(p3, 8.0 * p3.effective_target())
    assert abs(r3.charge - 8.0 ** (1.0 / 6.0)) < 1e-13
    assert abs(r3.target_volume - 8.0 * 4 * math.pi / 3) < 1e-12

    p2 = ModelParams(dimension=2, alpha=1.5, charge=1.0)
    r2 = params_for_mass(p2, 16.0 * p2.effective_target())
    assert abs(r2.charge - 16.0 ** ((1.0 - 1.5) / 4.0)) < 1e-13


def test_params_for_mass_transport_matches_dilation():
    # dilating the ball by lam multiplies the capacitary term by
    # lam^(alpha-3); the transported charge at mass lam^3 m0 compensates
    # exactly, keeping Q^2 I invariant
    params = ModelParams(dimension=3, alpha=2.2, charge=0.4)
    lam = 1.6
    mass = lam**3 * params.effective_target()
    rescaled = params_for_mass(params, mass)
    base = evaluate(SphereField.zero(get_grid(8)), params)
    moved = evaluate(SphereField.zero(get_grid(8)), rescaled, radius=lam)
    assert abs(moved.capacitary - base.capacitary * lam ** (params.alpha - 3.0)
               * (rescaled.charge / params.charge) ** 2) < 1e-12


def test_threshold_diagnostics_mentions_regime():
    b = ball_breakdown(charge=5.0, band=6)
    notes = threshold_diagnostics(b)
    assert isinstance(notes, list)
    assert all(isinstance(n, str) for n in notes)
