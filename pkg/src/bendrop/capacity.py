"""Equilibrium charge distributions and the capacitary energy term.

For a compact set E and exponent ``s = d - alpha`` the capacitary term is

    I(E) = min { sum q_i q_j k(c_i, c_j) : sum q_i = 1 }

over charges placed on a discretization of E, where ``k`` is the Riesz
kernel ``|x - y|^(-s)``.  Off-diagonal entries use centroid distances; each
diagonal entry is the analytic self-energy of a uniformly charged model
element (flat disk for surface panels, segment for curve panels, ball for
volume cells) of equal measure.  Pairs of oriented boundary elements closer
than a cutoff get a product-quadrature correction (see ``_accel``), which is
what pushes sphere-capacity errors below the advertised tolerances at desk
panel counts.

The L2 regularization ``eta * int mu^2`` adds ``eta * q_i^2 / m_i`` to the
objective, i.e. a diagonal term in the same quadratic form.

The linear systems are solved by Jacobi-preconditioned conjugate gradients
with a fixed, sequential reduction order (numpy dot products), so single
threaded runs are bit-reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field
from functools import lru_cache

import numpy as np
from scipy.integrate import quad

from . import _accel
from .errors import InputError, NumericalError, UsageError

__all__ = [
    "KernelSpec",
    "DiscretizedSet",
    "ChargeDistribution",
    "assemble_kernel",
    "equilibrium_measure",
    "capacity_value",
    "charge_energy",
    "scaling_check",
    "perturbation_bound_check",
    "dilate_set",
    "translate_set",
    "fibonacci_sphere_panels",
    "surface_panels",
    "curve_panels",
    "circle_panels",
    "ball_cells",
    "disk_cells",
    "disk_self_constant",
    "ball_self_constant",
    "segment_self_energy",
    "NEAR_FIELD_CUTOFF",
]

NEAR_FIELD_CUTOFF = 2.0


@dataclass(frozen=True)
class KernelSpec:
    """Riesz kernel parameters: dimension d, order alpha in (0, d), eta >= 0."""

    dimension: int
    alpha: float
    eta: float = 0.0

    def __post_init__(self):
        if self.dimension not in (2, 3):
            raise UsageError("kernel dimension must be 2 or 3")
        if not (0.0 < self.alpha < self.dimension):
            raise UsageError(
                f"alpha must lie in (0, {self.dimension}) for dimension "
                f"{self.dimension}, got {self.alpha}"
            )
        if not np.isfinite(self.eta) or self.eta < 0.0:
            raise UsageError("eta must be finite and nonnegative")

    @property
    def s(self) -> float:
        return self.dimension - self.alpha

    def regime_note(self, mode: str) -> str | None:
        """Flag parameter regimes the panel rules are not validated for."""
        if self.dimension == 3 and mode == "boundary" and self.alpha < 2.0:
            return (
                "alpha < 2 with boundary panels in 3D is outside the "
                "validated range; values are indicative only"
            )
        return None


@dataclass
class DiscretizedSet:
    """Element soup: centroids, measures, diameters, optional orientations.

    mode is "boundary" (surface/curve panels, measure = area/length) or
    "volume" (cells, measure = volume/area).  ``normals`` (3D panels) or
    ``tangents`` (2D panels) enable the near-field pair correction; sets
    without orientation data fall back to the plain centroid rule.
    """

    dimension: int
    mode: str
    centroids: np.ndarray
    measures: np.ndarray
    diameters: np.ndarray
    normals: np.ndarray | None = None
    tangents: np.ndarray | None = None
    label: str = ""

    def __post_init__(self):
        self.centroids = np.ascontiguousarray(self.centroids, dtype=np.float64)
        self.measures = np.ascontiguousarray(self.measures, dtype=np.float64)
        self.diameters = np.ascontiguousarray(self.diameters, dtype=np.float64)
        if self.mode not in ("boundary", "volume"):
            raise UsageError("set mode must be 'boundary' or 'volume'")
        if self.dimension not in (2, 3):
            raise UsageError("set dimension must be 2 or 3")
        n = self.centroids.shape[0]
        if n == 0:
            raise InputError("discretized set has no elements")
        if self.centroids.shape != (n, self.dimension):
            raise InputError(
                f"centroid array shape {self.centroids.shape} does not match "
                f"dimension {self.dimension}"
            )
        if self.measures.shape != (n,) or self.diameters.shape != (n,):
            raise InputError("measure/diameter arrays must have one entry per element")
        if not np.all(np.isfinite(self.centroids)):
            raise InputError("non-finite element centroid")
        if np.any(self.measures <= 0.0) or not np.all(np.isfinite(self.measures)):
            raise InputError("element measures must be positive and finite")
        if np.any(self.diameters <= 0.0) or not np.all(np.isfinite(self.diameters)):
            raise InputError("element diameters must be positive and finite")
        if self.normals is not None:
            self.normals = np.ascontiguousarray(self.normals, dtype=np.float64)
        if self.tangents is not None:
            self.tangents = np.ascontiguousarray(self.tangents, dtype=np.float64)

    @property
    def n_elements(self) -> int:
        return self.centroids.shape[0]


@dataclass
class ChargeDistribution:
    """Equilibrium (or candidate) measure on a discretized set."""

    set: DiscretizedSet
    spec: KernelSpec
    densities: np.ndarray
    charges: np.ndarray
    value: float
    riesz_part: float
    eta_part: float
    residual: float
    iterations: int
    note: str | None = None

    def total_mass(self) -> float:
        return float(np.dot(self.densities, self.set.measures))


# ---------------------------------------------------------------------------
# analytic self-energies of uniformly charged model elements
# ---------------------------------------------------------------------------


@lru_cache(maxsize=64)
def disk_self_constant(s: float) -> float:
    """Self-energy of a uniformly charged unit-radius flat disk.

    Mean of |x-y|^(-s) over independent uniform pairs; the pair-distance
    density of the unit disk is p(t) = (4t/pi)(arccos(t/2) - (t/2)
    sqrt(1-t^2/4)) on [0, 2].  Finite for s < 2.  At s = 1 it equals
    16/(3 pi), a cross-check used by the tests.
    """
    if s >= 2.0:
        raise UsageError("disk self-energy diverges for s >= 2")
    if s == 0.0:
        return 1.0

    def integrand(t):
        return t ** (-s) * (4.0 * t / np.pi) * (
            np.arccos(0.5 * t) - 0.5 * t * np.sqrt(1.0 - 0.25 * t * t)
        )

    val, _ = quad(integrand, 0.0, 2.0, epsabs=1e-13, epsrel=1e-13, limit=400)
    return float(val)


def ball_self_constant(s: float) -> float:
    """Self-energy of a uniformly charged unit-radius ball (finite for s < 3).

    Closed form from the pair-distance density 3t^2 - (9/4)t^3 + (3/16)t^5:
    at s = 1 this is 6/5.
    """
    if s >= 3.0:
        raise UsageError("ball self-energy diverges for s >= 3")
    if s == 0.0:
        return 1.0
    return float(
        3.0 * 2.0 ** (3.0 - s) / (3.0 - s)
        - 9.0 * 2.0 ** (2.0 - s) / (4.0 - s)
        + 3.0 * 2.0 ** (2.0 - s) / (6.0 - s)
    )


def segment_self_energy(length: float, s: float) -> float:
    """Self-energy of a uniformly charged segment (finite for s < 1)."""
    if s >= 1.0:
        raise UsageError("segment self-energy diverges for s >= 1")
    if s == 0.0:
        return 1.0
    return float(length ** (-s) * 2.0 / ((1.0 - s) * (2.0 - s)))


def _self_energies(dset: DiscretizedSet, spec: KernelSpec) -> np.ndarray:
    s = spec.s
    m = dset.measures
    if dset.mode == "volume":
        if dset.dimension == 3:
            radii = (3.0 * m / (4.0 * np.pi)) ** (1.0 / 3.0)
            return ball_self_constant(s) * radii ** (-s)
        radii = np.sqrt(m / np.pi)
        return disk_self_constant(s) * radii ** (-s)
    if dset.dimension == 3:
        if s >= 2.0:
            raise UsageError(
                "boundary panels need alpha > 1 in 3D (disk self-energy "
                "diverges); use volume cells for smaller alpha"
            )
        radii = np.sqrt(m / np.pi)
        return disk_self_constant(s) * radii ** (-s)
    if s >= 1.0:
        raise UsageError(
            "boundary panels need alpha > 1 in 2D (segment self-energy "
            "diverges); use area cells for smaller alpha"
        )
    return np.array([segment_self_energy(li, s) for li in m])


# ---------------------------------------------------------------------------
# kernel assembly
# ---------------------------------------------------------------------------


def _unit_charge_matrix(dset: DiscretizedSet, spec: KernelSpec) -> np.ndarray:
    """Matrix G with G[i,j] = interaction energy of unit charges on elements
    i and j; diagonal = per-element self-energy."""
    if dset.dimension != spec.dimension:
        raise InputError(
            f"set is {dset.dimension}D but the kernel spec says "
            f"{spec.dimension}D"
        )
    s = spec.s
    G = _accel.pairwise_power(dset.centroids, s)
    bad = ~np.isfinite(G)
    np.fill_diagonal(bad, False)
    if np.any(bad):
        pairs = np.argwhere(np.triu(bad, k=1))[:5]
        listing = ", ".join(f"({i}, {j})" for i, j in pairs)
        raise InputError(f"coincident element centroids: pairs {listing}")
    if dset.mode == "boundary":
        if dset.dimension == 3 and dset.normals is not None:
            radii = np.sqrt(dset.measures / np.pi)
            _accel.correct_surface_pairs(
                G, dset.centroids, dset.normals, radii, s, NEAR_FIELD_CUTOFF
            )
        elif dset.dimension == 2 and dset.tangents is not None:
            half = 0.5 * dset.measures
            _accel.correct_curve_pairs(
                G, dset.centroids, dset.tangents, half, s, NEAR_FIELD_CUTOFF
            )
    np.fill_diagonal(G, _self_energies(dset, spec))
    return G


def assemble_kernel(dset: DiscretizedSet, spec: KernelSpec) -> np.ndarray:
    """Density-variable interaction matrix K[i,j] = m_i m_j k(c_i, c_j).

    The quadratic form ``mu^T K mu`` over densities mu with
    ``sum mu_i m_i = 1`` is the discrete Riesz energy; the eta term is not
    included here (it enters the stationarity system in
    :func:`equilibrium_measure`).
    """
    G = _unit_charge_matrix(dset, spec)
    m = dset.measures
    return G * np.outer(m, m)


# ---------------------------------------------------------------------------
# conjugate-gradient solve
# ---------------------------------------------------------------------------


def _cg_solve(B: np.ndarray, rhs: np.ndarray, rel_residual: float, max_iter: int):
    """Jacobi-preconditioned CG for a symmetric positive-definite system.

    Raises NumericalError when a nonpositive curvature direction is met
    (matrix not PD, e.g. the diagonal rule was too coarse for the panel
    layout) or when the iteration budget runs out.
    """
    diag = np.diag(B).copy()
    if np.any(diag <= 0.0):
        raise NumericalError(
            "kernel matrix has a nonpositive diagonal; discretization invalid"
        )
    inv_diag = 1.0 / diag
    x = np.zeros_like(rhs)
    r = rhs.copy()
    z = inv_diag * r
    p = z.copy()
    rz = float(np.dot(r, z))
    target = rel_residual * float(np.linalg.norm(rhs))
    resid = float(np.linalg.norm(r))
    it = 0
    while resid > target:
        if it >= max_iter:
            raise NumericalError(
                f"conjugate gradients did not reach relative residual "
                f"{rel_residual:g} in {max_iter} iterations (residual "
                f"{resid / max(np.linalg.norm(rhs), 1e-300):g})"
            )
        Bp = B @ p
        curv = float(np.dot(p, Bp))
        if curv <= 0.0:
            raise NumericalError(
                "kernel matrix is not positive definite (nonpositive "
                "curvature in CG); the self-energy rule is too coarse for "
                "this element layout"
            )
        alpha = rz / curv
        x += alpha * p
        r -= alpha * Bp
        resid = float(np.linalg.norm(r))
        z = inv_diag * r
        rz_new = float(np.dot(r, z))
        p = z + (rz_new / rz) * p
        rz = rz_new
        it += 1
    return x, resid / max(float(np.linalg.norm(rhs)), 1e-300), it


# ---------------------------------------------------------------------------
# equilibrium problem
# ---------------------------------------------------------------------------


def equilibrium_measure(
    dset: DiscretizedSet,
    spec: KernelSpec,
    rel_residual: float = 1e-10,
    max_iter: int = 20000,
    negativity_tol: float = 1e-6,
) -> ChargeDistribution:
    """Minimize the (eta-regularized) Riesz energy over unit-mass measures.

    Stationarity of ``q^T (G + eta diag(1/m)) q`` under ``sum q = 1`` gives
    ``(G + eta diag(1/m)) q = const``; the solution is ``q = y / sum(y)``
    with ``B y = ones`` and the minimum value is ``1 / sum(y)``.

    Nonnegativity of the equilibrium density is a theorem, not a constraint:
    for eta = 0 it is asserted after the solve (tolerance relative to the
    max density) and a violation signals a discretization problem.
    """
    B = _unit_charge_matrix(dset, spec)
    if spec.eta > 0.0:
        B = B + np.diag(spec.eta / dset.measures)
    ones = np.ones(dset.n_elements)
    y, residual, iterations = _cg_solve(B, ones, rel_residual, max_iter)
    total = float(np.sum(y))
    if total <= 0.0:
        raise NumericalError("equilibrium solve produced nonpositive total charge")
    q = y / total
    value = 1.0 / total
    densities = q / dset.measures
    if spec.eta == 0.0:
        dmax = float(np.max(densities))
        dmin = float(np.min(densities))
        if dmin < -negativity_tol * dmax:
            raise NumericalError(
                f"equilibrium density reaches {dmin:.3e} (max {dmax:.3e}); "
                "negative beyond tolerance - the discretization is too "
                "coarse or alpha is outside the validated range"
            )
    eta_part = float(spec.eta * np.sum(q * q / dset.measures))
    return ChargeDistribution(
        set=dset,
        spec=spec,
        densities=densities,
        charges=q,
        value=value,
        riesz_part=value - eta_part,
        eta_part=eta_part,
        residual=residual,
        iterations=iterations,
        note=spec.regime_note(dset.mode),
    )


def capacity_value(dset: DiscretizedSet, spec: KernelSpec, **kw) -> float:
    """1 / I_alpha^eta: the (generalized) capacity of the discretized set."""
    return 1.0 / equilibrium_measure(dset, spec, **kw).value


def charge_energy(dset: DiscretizedSet, spec: KernelSpec, charges: np.ndarray) -> float:
    """Objective value of an arbitrary charge vector (unit mass not required)."""
    charges = np.asarray(charges, dtype=np.float64)
    B = _unit_charge_matrix(dset, spec)
    val = float(charges @ B @ charges)
    if spec.eta > 0.0:
        val += float(spec.eta * np.sum(charges * charges / dset.measures))
    return val


# ---------------------------------------------------------------------------
# set transformations and checks
# ---------------------------------------------------------------------------


def dilate_set(dset: DiscretizedSet, lam: float) -> DiscretizedSet:
    """Dilation about the origin; measures scale with the element dimension."""
    if lam <= 0.0:
        raise UsageError("dilation factor must be positive")
    k = dset.dimension - 1 if dset.mode == "boundary" else dset.dimension
    return DiscretizedSet(
        dimension=dset.dimension,
        mode=dset.mode,
        centroids=dset.centroids * lam,
        measures=dset.measures * lam**k,
        diameters=dset.diameters * lam,
        normals=None if dset.normals is None else dset.normals.copy(),
        tangents=None if dset.tangents is None else dset.tangents.copy(),
        label=dset.label,
    )


def translate_set(dset: DiscretizedSet, shift) -> DiscretizedSet:
    shift = np.asarray(shift, dtype=np.float64)
    if shift.shape != (dset.dimension,):
        raise UsageError("translation vector dimension mismatch")
    return DiscretizedSet(
        dimension=dset.dimension,
        mode=dset.mode,
        centroids=dset.centroids + shift,
        measures=dset.measures.copy(),
        diameters=dset.diameters.copy(),
        normals=None if dset.normals is None else dset.normals.copy(),
        tangents=None if dset.tangents is None else dset.tangents.copy(),
        label=dset.label,
    )


def scaling_check(dset: DiscretizedSet, spec: KernelSpec, lam: float, **kw):
    """Dilation comparison (lhs, rhs): lhs = I(lam E), rhs = scaling bound.

    For eta = 0 the discrete energy scales exactly like lam^(alpha - d), so
    rhs = lam^(alpha-d) I(E) and lhs = rhs to solver accuracy.  For eta > 0
    the eta term scales like lam^(-d) and only the upper bound
    rhs = max(lam^(alpha-d), lam^(-d)) I(E) holds.
    """
    if lam <= 0.0:
        raise UsageError("dilation factor must be positive")
    lhs = equilibrium_measure(dilate_set(dset, lam), spec, **kw).value
    base = equilibrium_measure(dset, spec, **kw).value
    d = dset.dimension
    if spec.eta == 0.0:
        rhs = lam ** (spec.alpha - d) * base
    else:
        rhs = max(lam ** (spec.alpha - d), lam ** (-d)) * base
    return lhs, rhs


def perturbation_bound_check(
    e_set: DiscretizedSet,
    f_set: DiscretizedSet,
    rho: float,
    spec: KernelSpec,
    constant: float = 1.0,
    containment_slack: float = 1.02,
    **kw,
):
    """(I(E) - I(F), constant * rho^(d - alpha)) for a localized perturbation.

    Requires matched discretizations: equal element counts with identical
    rows outside the perturbation, and all differing elements (including
    their extent) inside a ball of radius ``rho * containment_slack``.
    """
    if e_set.n_elements != f_set.n_elements:
        raise InputError(
            "perturbation check needs matched discretizations with equal "
            "element counts"
        )
    if rho <= 0.0:
        raise UsageError("perturbation radius must be positive")
    moved = np.any(e_set.centroids != f_set.centroids, axis=1)
    moved |= e_set.measures != f_set.measures
    if np.any(moved):
        pts = np.vstack([e_set.centroids[moved], f_set.centroids[moved]])
        ext = np.concatenate([e_set.diameters[moved], f_set.diameters[moved]]) * 0.5
        center = 0.5 * (pts.min(axis=0) + pts.max(axis=0))
        reach = float(np.max(np.linalg.norm(pts - center, axis=1) + ext))
        if reach > rho * containment_slack:
            raise InputError(
                f"perturbed elements reach {reach:.4f} from their center, "
                f"outside the declared radius {rho:g}"
            )
    i_e = equilibrium_measure(e_set, spec, **kw).value
    i_f = equilibrium_measure(f_set, spec, **kw).value
    exponent = e_set.dimension - spec.alpha
    return i_e - i_f, constant * rho**exponent


# ---------------------------------------------------------------------------
# set constructors
# ---------------------------------------------------------------------------


def fibonacci_sphere_panels(
    n: int, radius: float = 1.0, center=(0.0, 0.0, 0.0)
) -> DiscretizedSet:
    """Golden-spiral sphere covering with equal-area panels."""
    if n < 1:
        raise UsageError("panel count must be positive")
    i = np.arange(n, dtype=np.float64)
    golden = (1.0 + np.sqrt(5.0)) / 2.0
    z = 1.0 - (2.0 * i + 1.0) / n
    r_xy = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    phi = 2.0 * np.pi * i / golden
    unit = np.stack([r_xy * np.cos(phi), r_xy * np.sin(phi), z], axis=-1)
    area = 4.0 * np.pi * radius**2 / n
    return DiscretizedSet(
        dimension=3,
        mode="boundary",
        centroids=np.asarray(center, dtype=np.float64) + radius * unit,
        measures=np.full(n, area),
        diameters=np.full(n, 2.0 * np.sqrt(area / np.pi)),
        normals=unit,
        label=f"fibonacci-sphere-{n}",
    )


def surface_panels(geom) -> DiscretizedSet:
    """Boundary panels from the quadrature nodes of a graph surface.

    Near the poles of the latitude-longitude grid every ring still carries
    the full longitude count, so raw nodes there are thin slivers packed
    closer than their own size; the equal-area-disk self-energy model then
    underestimates the diagonal and positive definiteness is lost.
    Consecutive nodes of such rings are merged into near-square panels
    (with exactly preserved total measure) before being handed to the
    kernel assembly.
    """
    grid = geom.grid
    pos = geom.position
    areas = geom.area_element
    normals = geom.normal
    n_phi = grid.n_phi
    centroids, measures, diams, nus = [], [], [], []
    for j in range(grid.n_theta):
        st = grid.sin_theta[j]
        dtheta = grid.theta_weights[j] / st  # polar extent of this ring
        n_groups = int(np.clip(round(2.0 * np.pi * st * st / grid.theta_weights[j]), 1, n_phi))
        r_mean = float(np.mean(np.linalg.norm(pos[j], axis=-1)))
        for idx in np.array_split(np.arange(n_phi), n_groups):
            a = areas[j, idx]
            total = float(np.sum(a))
            c = a @ pos[j, idx] / total
            nrm = np.linalg.norm(c)
            c = c * (np.sum(a * np.linalg.norm(pos[j, idx], axis=-1)) / total / nrm)
            nu = a @ normals[j, idx]
            nus.append(nu / np.linalg.norm(nu))
            centroids.append(c)
            measures.append(total)
            arc = np.hypot(idx.size * 2.0 * np.pi * st / n_phi, dtheta) * r_mean
            diams.append(max(2.0 * np.sqrt(total / np.pi), arc))
    measures = np.asarray(measures)
    return DiscretizedSet(
        dimension=3,
        mode="boundary",
        centroids=np.asarray(centroids),
        measures=measures,
        diameters=np.asarray(diams),
        normals=np.asarray(nus),
        label="surface-panels",
    )


def curve_panels(shape, n: int | None = None) -> DiscretizedSet:
    """Arclength panels along a star-shaped curve."""
    from . import curves

    points, tangents, weights = curves.curve_nodes(shape, n)
    return DiscretizedSet(
        dimension=2,
        mode="boundary",
        centroids=points,
        measures=weights,
        diameters=weights.copy(),
        tangents=tangents,
        label="curve-panels",
    )


def circle_panels(n: int, radius: float = 1.0, center=(0.0, 0.0)) -> DiscretizedSet:
    if n < 1:
        raise UsageError("panel count must be positive")
    theta = 2.0 * np.pi * np.arange(n) / n
    ct, st = np.cos(theta), np.sin(theta)
    pts = np.asarray(center, dtype=np.float64) + radius * np.stack([ct, st], axis=-1)
    arc = 2.0 * np.pi * radius / n
    return DiscretizedSet(
        dimension=2,
        mode="boundary",
        centroids=pts,
        measures=np.full(n, arc),
        diameters=np.full(n, arc),
        tangents=np.stack([-st, ct], axis=-1),
        label=f"circle-{n}",
    )


def ball_cells(n_target: int, radius: float = 1.0, center=(0.0, 0.0, 0.0)) -> DiscretizedSet:
    """Cubic lattice cells fully inside a ball (measure = cell volume).

    The covered volume is slightly below the ball volume (staircase
    boundary); adequate for the volumetric eta > 0 regime, not for
    boundary-accuracy oracles.
    """
    if n_target < 8:
        raise UsageError("ball cell count must be at least 8")
    h = (4.0 * np.pi * radius**3 / (3.0 * n_target)) ** (1.0 / 3.0)
    k = int(np.ceil(radius / h)) + 1
    g = (np.arange(-k, k + 1) + 0.5) * h
    X, Y, Z = np.meshgrid(g, g, g, indexing="ij")
    pts = np.stack([X.ravel(), Y.ravel(), Z.ravel()], axis=-1)
    inside = np.linalg.norm(pts, axis=1) <= radius - 0.5 * h * np.sqrt(3.0)
    pts = pts[inside]
    if pts.shape[0] == 0:
        raise UsageError("cell size too coarse: no lattice cell fits the ball")
    n = pts.shape[0]
    return DiscretizedSet(
        dimension=3,
        mode="volume",
        centroids=np.asarray(center, dtype=np.float64) + pts,
        measures=np.full(n, h**3),
        diameters=np.full(n, h * np.sqrt(3.0)),
        label=f"ball-cells-{n}",
    )


def disk_cells(n_rings: int, radius: float = 1.0, center=(0.0, 0.0)) -> DiscretizedSet:
    """Polar grid of equal-area, nearly square cells covering a disk.

    Ring j (1-based, uniform radial width) is split into 4(2j-1) sectors, so
    every cell has area pi R^2 / (4 n^2).  Centroids sit at the exact area
    centroid of each annular sector.
    """
    if n_rings < 1:
        raise UsageError("ring count must be positive")
    cells = []
    dr = radius / n_rings
    for j in range(1, n_rings + 1):
        r1, r2 = (j - 1) * dr, j * dr
        nj = 4 * (2 * j - 1)
        dphi = 2.0 * np.pi / nj
        rc = (2.0 / 3.0) * (r2**3 - r1**3) / (r2**2 - r1**2)
        rc *= np.sin(0.5 * dphi) / (0.5 * dphi)
        phis = dphi * (np.arange(nj) + 0.5)
        for p in phis:
            cells.append((rc * np.cos(p), rc * np.sin(p)))
    pts = np.asarray(cells) + np.asarray(center, dtype=np.float64)
    n = pts.shape[0]
    area = np.pi * radius**2 / n
    return DiscretizedSet(
        dimension=2,
        mode="volume",
        centroids=pts,
        measures=np.full(n, area),
        diameters=np.full(n, 2.0 * np.sqrt(area / np.pi)),
        label=f"disk-cells-{n}",
    )
