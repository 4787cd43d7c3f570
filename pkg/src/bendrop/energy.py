"""Total energy of charged drops: surface terms plus capacitary interaction.

The model energy of a shape E at perimeter weight lam and charge Q is

    F(E) = lam * P(E) + W(E) + Q^2 * I(E),

where P is the boundary measure, W the squared-curvature (bending) energy
with the quarter-H^2 convention on surfaces, and I the equilibrium
interaction energy of a unit charge on E for the inverse-power kernel.  The
relaxed functional used for minimization replaces W by the full
second-fundamental-form energy (they differ by a topological constant on
genus-zero surfaces) and trades the hard volume constraint for a penalty:

    F_rel(E) = (1/4) * int |A|^2 + Q^2 * I_eta(E) + penalty * | |E| - v0 |.

In the plane the curvature energy has no topological shift and remains in
both totals together with the perimeter term.

`evaluate` computes every term on a single discretization of the shape so
that differences of breakdowns are internally consistent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .capacity import KernelSpec, curve_panels, equilibrium_measure, surface_panels
from .curves import CurveShape, curve_measures
from .errors import UsageError
from .sphere import (
    SphereField,
    SphereGrid,
    area as surface_area,
    bending_energies,
    get_grid,
    surface_from_field,
    volume as surface_volume,
)

__all__ = [
    "ModelParams",
    "EnergyBreakdown",
    "evaluate",
    "genus_zero_energy_gap",
    "threshold_diagnostics",
    "params_for_mass",
]


@dataclass(frozen=True)
class ModelParams:
    """Physical and numerical parameters of the charged-drop energy.

    penalty defaults to max(10 Q^2, 1): large enough to dominate the
    capacitary gain available from volume changes near the unit ball, small
    enough not to wreck line-search step sizes.  target_volume defaults to
    the unit-ball measure of the ambient dimension.
    """

    dimension: int = 3
    alpha: float = 2.0
    eta: float = 0.0
    charge: float = 0.0
    lambda_perimeter: float = 1.0
    penalty: float | None = None
    target_volume: float | None = None
    quadrature_factor: int = 4

    def __post_init__(self):
        if self.dimension not in (2, 3):
            raise UsageError("dimension must be 2 or 3")
        if not 0.0 < self.alpha < self.dimension:
            raise UsageError(
                f"alpha must lie in (0, {self.dimension}) for the kernel to be"
                " a positive Riesz interaction"
            )
        if not 0.0 <= self.eta <= 1.0:
            raise UsageError("regularization strength eta must lie in [0, 1]")
        if self.lambda_perimeter < 0.0:
            raise UsageError("perimeter weight must be nonnegative")
        if self.penalty is not None and self.penalty < 0.0:
            raise UsageError("volume penalty must be nonnegative")
        if self.target_volume is not None and self.target_volume <= 0.0:
            raise UsageError("target volume must be positive")
        if self.quadrature_factor < 1:
            raise UsageError("quadrature factor must be at least 1")

    @property
    def kernel(self) -> KernelSpec:
        return KernelSpec(dimension=self.dimension, alpha=self.alpha, eta=self.eta)

    def effective_penalty(self) -> float:
        if self.penalty is not None:
            return self.penalty
        return max(10.0 * self.charge**2, 1.0)

    def effective_target(self) -> float:
        if self.target_volume is not None:
            return self.target_volume
        return 4.0 * math.pi / 3.0 if self.dimension == 3 else math.pi


@dataclass(frozen=True)
class EnergyBreakdown:
    """Every term of the model and relaxed energies for one shape.

    capacitary already carries the Q^2 factor, so the totals are plain sums
    of fields; interaction_value keeps the bare equilibrium energy for
    difference-based diagnostics (zero when the solve was skipped).
    """

    dimension: int
    perimeter: float
    willmore: float
    bending: float
    traceless: float
    capacitary: float
    interaction_value: float
    volume: float
    volume_penalty: float
    total_model: float
    total_relaxed: float
    n_panels: int
    capacity_iterations: int

    def as_dict(self) -> dict:
        return {
            "dimension": self.dimension,
            "perimeter": self.perimeter,
            "willmore": self.willmore,
            "bending": self.bending,
            "traceless": self.traceless,
            "capacitary": self.capacitary,
            "interaction_value": self.interaction_value,
            "volume": self.volume,
            "volume_penalty": self.volume_penalty,
            "total_model": self.total_model,
            "total_relaxed": self.total_relaxed,
            "n_panels": self.n_panels,
            "capacity_iterations": self.capacity_iterations,
        }


def _capacity_grid(field: SphereField, params: ModelParams) -> SphereGrid:
    band = max(16, params.quadrature_factor * field.grid.band_limit)
    return get_grid(band)


def _evaluate_surface(
    field: SphereField,
    params: ModelParams,
    radius: float,
    grid: SphereGrid | None,
    rel_residual: float,
) -> EnergyBreakdown:
    geom = surface_from_field(field, radius=radius, grid=grid or _capacity_grid(field, params))
    bend = bending_energies(geom)
    area = surface_area(geom)
    volume = surface_volume(geom)
    willmore = 0.25 * bend["h_squared"]
    interaction = 0.0
    iters = 0
    n_panels = 0
    if params.charge != 0.0:
        panels = surface_panels(geom)
        dist = equilibrium_measure(panels, params.kernel, rel_residual=rel_residual)
        interaction = dist.value
        iters = dist.iterations
        n_panels = panels.centroids.shape[0]
    penalty = params.effective_penalty() * abs(volume - params.effective_target())
    capacitary = params.charge**2 * interaction
    return EnergyBreakdown(
        dimension=3,
        perimeter=area,
        willmore=willmore,
        bending=bend["second_form_squared"],
        traceless=bend["traceless_squared"],
        capacitary=capacitary,
        interaction_value=interaction,
        volume=volume,
        volume_penalty=penalty,
        total_model=params.lambda_perimeter * area + willmore + capacitary,
        total_relaxed=0.25 * bend["second_form_squared"] + capacitary + penalty,
        n_panels=n_panels,
        capacity_iterations=iters,
    )


def _evaluate_curve(
    shape: CurveShape,
    params: ModelParams,
    rel_residual: float,
) -> EnergyBreakdown:
    meas = curve_measures(shape)
    elastic = meas["elastic"]
    interaction = 0.0
    iters = 0
    n_panels = 0
    if params.charge != 0.0:
        panels = curve_panels(shape, shape.n_samples)
        dist = equilibrium_measure(panels, params.kernel, rel_residual=rel_residual)
        interaction = dist.value
        iters = dist.iterations
        n_panels = panels.centroids.shape[0]
    penalty = params.effective_penalty() * abs(meas["area"] - params.effective_target())
    capacitary = params.charge**2 * interaction
    base = params.lambda_perimeter * meas["length"] + elastic + capacitary
    return EnergyBreakdown(
        dimension=2,
        perimeter=meas["length"],
        willmore=elastic,
        bending=elastic,
        traceless=0.0,
        capacitary=capacitary,
        interaction_value=interaction,
        volume=meas["area"],
        volume_penalty=penalty,
        total_model=base,
        total_relaxed=base + penalty,
        n_panels=n_panels,
        capacity_iterations=iters,
    )


def evaluate(
    shape: SphereField | CurveShape,
    params: ModelParams,
    radius: float = 1.0,
    grid: SphereGrid | None = None,
    rel_residual: float = 1e-10,
) -> EnergyBreakdown:
    """Full energy breakdown of a star-shaped surface or planar curve.

    Surfaces are graphs ``radius (1 + phi) x`` over the unit sphere given
    as the coefficient field phi; curves are radial Fourier profiles.  All
    surface terms and the charge panels come from one quadrature grid (by
    default quadrature_factor times the field's band limit, at least 16),
    so the capacitary term varies smoothly with the coefficients; pass
    ``grid`` to pin the resolution.  The equilibrium solve is skipped
    entirely at zero charge.
    """
    if params.dimension == 3:
        if not isinstance(shape, SphereField):
            raise UsageError("three-dimensional parameters require a sphere field")
        return _evaluate_surface(shape, params, radius, grid, rel_residual)
    if not isinstance(shape, CurveShape):
        raise UsageError("two-dimensional parameters require a curve shape")
    if grid is not None:
        raise UsageError("grid is a surface-only option; curves carry their own sampling")
    if radius != 1.0:
        raise UsageError("curve scale lives in the shape's base radius, not a radius argument")
    return _evaluate_curve(shape, params, rel_residual)


def genus_zero_energy_gap(breakdown: EnergyBreakdown) -> float:
    """Quarter-H^2 energy minus quarter-|A|^2 energy minus 2 pi.

    Vanishes identically on closed genus-zero surfaces: the difference of
    the two curvature energies is half the total Gauss curvature.  A
    nonzero value therefore measures quadrature error, never geometry.
    """
    if breakdown.dimension != 3:
        raise UsageError("the topological energy gap is a surface quantity")
    return breakdown.willmore - 0.25 * breakdown.bending - 2.0 * math.pi


def threshold_diagnostics(breakdown: EnergyBreakdown) -> list[str]:
    """Warnings when curvature energy leaves the near-ball regime.

    The round sphere has quarter-H^2 energy 4 pi; values at twice that mean
    the shape is far from any ball and threshold comparisons against ball
    asymptotics stop being meaningful.  Planar curves use the
    scale-invariant product of elastic energy and length, which is (2 pi)^2
    exactly on circles.
    """
    notes = []
    if breakdown.dimension == 3:
        if breakdown.willmore >= 8.0 * math.pi:
            notes.append(
                "quarter-H^2 energy is at least twice the spherical value;"
                " ball-based threshold asymptotics do not apply"
            )
        if 0.25 * breakdown.bending >= 4.0 * math.pi:
            notes.append(
                "second-form energy exceeds twice its spherical minimum;"
                " shape is outside the near-ball regime"
            )
    else:
        invariant = breakdown.bending * breakdown.perimeter
        if invariant >= 4.0 * (2.0 * math.pi) ** 2:
            notes.append(
                "elastic-energy times length is four times the circle value;"
                " circle-based threshold asymptotics do not apply"
            )
    return notes


def params_for_mass(params: ModelParams, mass: float, reference_mass: float | None = None) -> ModelParams:
    """Charge rescaling that transports a threshold study to another mass.

    Dilating a surface by t multiplies the capacitary energy by t^(alpha-3)
    and leaves the curvature energy invariant, so the charge that keeps the
    curvature-capacity balance of the relaxed functional unchanged at mass
    m = t^3 m0 is Q (m/m0)^((3-alpha)/6).  In the plane the elastic energy
    scales as 1/t and the capacitary one as t^(alpha-2), giving exponent
    (1-alpha)/4 for m = t^2 m0.
    """
    if mass <= 0.0:
        raise UsageError("mass must be positive")
    m0 = reference_mass if reference_mass is not None else params.effective_target()
    if params.dimension == 3:
        exponent = (3.0 - params.alpha) / 6.0
    else:
        exponent = (1.0 - params.alpha) / 4.0
    return replace(
        params,
        charge=params.charge * (mass / m0) ** exponent,
        target_volume=mass,
    )
