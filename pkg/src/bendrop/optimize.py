"""Coefficient-space minimization and ball-stability analysis.

Shapes are minimized directly in their harmonic coefficients: central
finite differences give the gradient of the volume-projected energy, a
mode-stiffness diagonal preconditioner turns it into a scaled Newton-like
direction, and an Armijo backtracking line search keeps accepted energies
monotone.  The same projected-energy machinery yields second differences
along single modes, which is how the ball's stability spectrum and the
critical charge are measured.

Volume handling has two modes.  In "dilation-projection" (default) every
candidate shape is rescaled to the exact target volume before evaluation,
which removes the constant mode from the problem; bending energy is
scale-invariant in 3D and the capacitary energy scales by a known power, so
the projection is not just feasible but exact.  "penalty-only" leaves the
volume free and relies on the penalty term, exhibiting how a large enough
penalty weight pins the minimizer's volume on its own.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .curves import CurveShape
from .energy import EnergyBreakdown, ModelParams, evaluate
from .errors import NumericalError, ShapeError, UsageError
from .sphere import SphereField, get_grid

__all__ = [
    "OptimizerConfig",
    "IterationRecord",
    "Trajectory",
    "minimize",
    "project_volume",
    "ball_field",
    "disk_shape",
    "distance_to_round",
    "HessianAtBall",
    "hessian_at_ball",
    "ThresholdSweep",
    "threshold_sweep",
]


@dataclass(frozen=True)
class OptimizerConfig:
    """Descent settings; params carries the energy model itself."""

    params: ModelParams
    max_iterations: int = 80
    gradient_step: float = 1e-4
    initial_step: float = 1.0
    backtrack_factor: float = 0.5
    max_backtracks: int = 30
    armijo_slope: float = 1e-4
    gradient_tolerance: float = 1e-5
    energy_tolerance: float = 1e-12
    volume_mode: str = "dilation-projection"
    freeze_translations: bool = True
    seed: int | None = None
    # Equilibrium solves must be well below finite-difference resolution:
    # gradient components divide energy noise by 2 h_fd, so solver error
    # near 1e-10 would masquerade as a gradient of order 1e-6 at the ball.
    rel_residual: float = 1e-12

    def __post_init__(self):
        if not 1e-6 <= self.gradient_step <= 1e-2:
            raise UsageError("finite-difference step must lie in [1e-6, 1e-2]")
        if self.volume_mode not in ("dilation-projection", "penalty-only"):
            raise UsageError(
                "volume mode must be 'dilation-projection' or 'penalty-only'"
            )
        for name in ("initial_step", "backtrack_factor", "armijo_slope",
                     "gradient_tolerance", "energy_tolerance"):
            if getattr(self, name) <= 0.0:
                raise UsageError(f"{name} must be positive")
        if self.backtrack_factor >= 1.0:
            raise UsageError("backtrack factor must shrink the step")
        if self.max_iterations < 0 or self.max_backtracks < 1:
            raise UsageError("iteration budgets must be positive")


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    energy: float
    gradient_norm: float
    step: float
    backtracks: int
    volume: float
    max_deformation: float
    breakdown: EnergyBreakdown


@dataclass
class Trajectory:
    status: str
    records: list[IterationRecord] = field(default_factory=list)
    distance_to_round: float = math.nan
    n_evaluations: int = 0
    seed: int | None = None


def ball_field(volume: float, band_limit: int = 4) -> SphereField:
    """Round-sphere field whose graph encloses the given volume."""
    if volume <= 0.0:
        raise UsageError("volume must be positive")
    r = (3.0 * volume / (4.0 * math.pi)) ** (1.0 / 3.0)
    f = SphereField.zero(get_grid(band_limit))
    return f.with_coefficient(0, 0, (r - 1.0) * math.sqrt(4.0 * math.pi))


def disk_shape(area: float, degree: int = 16, n_samples: int = 1024) -> CurveShape:
    """Circle whose disk has the given area."""
    if area <= 0.0:
        raise UsageError("area must be positive")
    return CurveShape.circle(math.sqrt(area / math.pi), degree, n_samples)


def distance_to_round(shape: SphereField | CurveShape) -> float:
    """l2 norm of the degree-two-and-up coefficients.

    Zero exactly on balls and disks regardless of size (degree zero) or
    position gauge (degree one), making it the natural convergence metric.
    """
    if isinstance(shape, SphereField):
        return float(np.linalg.norm(shape.coeffs[4:]))
    return float(np.linalg.norm(shape.coeffs[3:]))


def _surface_volume_on(field_obj: SphereField, grid) -> float:
    from .sphere import surface_from_field, volume as surface_volume

    return surface_volume(surface_from_field(field_obj, grid=grid))


def project_volume(shape: SphereField | CurveShape, target: float, grid=None):
    """Rescale a shape to the exact target volume (area in the plane).

    Dilation acts affinely on graph coefficients: with factor t the new
    field is t - 1 + t*phi, so band limits are preserved and the projected
    volume equals the target to roundoff.  Curves carry the factor in their
    base radius instead, leaving the profile untouched.
    """
    if target <= 0.0:
        raise UsageError("target volume must be positive")
    if isinstance(shape, SphereField):
        eval_grid = grid if grid is not None else get_grid(max(16, 4 * shape.grid.band_limit))
        current = _surface_volume_on(shape, eval_grid)
        t = (target / current) ** (1.0 / 3.0)
        c = t * shape.coeffs
        c[0] += (t - 1.0) * math.sqrt(4.0 * math.pi)
        return SphereField(shape.grid, c)
    from .curves import curve_measures

    current = curve_measures(shape)["area"]
    t = math.sqrt(target / current)
    return CurveShape(shape.degree, shape.coeffs.copy(), t * shape.base_radius,
                      shape.n_samples)


class _SurfaceProblem:
    """Adapter exposing a sphere field as a flat optimization vector."""

    def __init__(self, initial: SphereField, config: OptimizerConfig):
        self.config = config
        self.grid = initial.grid
        self.eval_grid = get_grid(max(16, config.params.quadrature_factor
                                      * initial.grid.band_limit))
        L = initial.grid.band_limit
        lo = 2 if config.freeze_translations else 1
        if config.volume_mode == "penalty-only":
            lo = 0
        self.free = np.array(
            [l * l + l + m for l in range(lo, L + 1) for m in range(-l, l + 1)],
            dtype=np.int64,
        )
        if config.volume_mode == "penalty-only" and config.freeze_translations:
            keep = []
            for idx in self.free:
                l = int(math.isqrt(idx))
                if l != 1:
                    keep.append(idx)
            self.free = np.asarray(keep, dtype=np.int64)
        self.degrees = np.array([int(math.isqrt(int(i))) for i in self.free])
        self._template = initial.coeffs.copy()

    def vector(self, shape: SphereField) -> np.ndarray:
        return shape.coeffs[self.free].copy()

    def shape_from(self, base: SphereField, vec: np.ndarray) -> SphereField:
        c = base.coeffs.copy()
        c[self.free] = vec
        return SphereField(self.grid, c)

    def prepare(self, shape: SphereField) -> SphereField:
        if self.config.volume_mode == "dilation-projection":
            return project_volume(shape, self.config.params.effective_target(),
                                  grid=self.eval_grid)
        return shape

    def energy(self, shape: SphereField) -> EnergyBreakdown:
        return evaluate(shape, self.config.params, grid=self.eval_grid,
                        rel_residual=self.config.rel_residual)

    def deformation(self, shape: SphereField) -> float:
        return float(np.max(np.abs(shape.values())))


class _CurveProblem:
    """Adapter exposing a radial curve as a flat optimization vector."""

    def __init__(self, initial: CurveShape, config: OptimizerConfig):
        self.config = config
        self.degree = initial.degree
        self.n_samples = initial.n_samples
        lo = 2 if config.freeze_translations else 1
        idx = []
        for k in range(lo, initial.degree + 1):
            idx.extend([2 * k - 1, 2 * k])
        if config.volume_mode == "penalty-only":
            idx.append(0)
        self.free = np.asarray(sorted(idx), dtype=np.int64)
        self.degrees = np.array([(i + 1) // 2 for i in self.free])

    def vector(self, shape: CurveShape) -> np.ndarray:
        return shape.coeffs[self.free].copy()

    def shape_from(self, base: CurveShape, vec: np.ndarray) -> CurveShape:
        c = base.coeffs.copy()
        c[self.free] = vec
        return CurveShape(self.degree, c, base.base_radius, self.n_samples)

    def prepare(self, shape: CurveShape) -> CurveShape:
        if self.config.volume_mode == "dilation-projection":
            return project_volume(shape, self.config.params.effective_target())
        return shape

    def energy(self, shape: CurveShape) -> EnergyBreakdown:
        return evaluate(shape, self.config.params,
                        rel_residual=self.config.rel_residual)

    def deformation(self, shape: CurveShape) -> float:
        return float(np.max(np.abs(shape.values())))


def _problem_for(shape, config):
    if isinstance(shape, SphereField):
        if config.params.dimension != 3:
            raise UsageError("sphere fields require three-dimensional parameters")
        return _SurfaceProblem(shape, config)
    if isinstance(shape, CurveShape):
        if config.params.dimension != 2:
            raise UsageError("curves require two-dimensional parameters")
        return _CurveProblem(shape, config)
    raise UsageError("initial shape must be a sphere field or a curve")


def minimize(initial, config: OptimizerConfig):
    """Descend the relaxed energy from an initial shape.

    Returns (final shape, Trajectory).  Statuses: "converged" when the
    gradient norm or the energy decrease falls under tolerance, "stalled"
    when the line search cannot find a decrease, "max_iterations" when the
    budget runs out; none of these raises.  Inadmissible trial shapes are
    treated as failed line-search probes, not errors.
    """
    prob = _problem_for(initial, config)
    evals = 0

    def objective(vec):
        nonlocal evals
        shape = prob.prepare(prob.shape_from(base_shape, vec))
        bd = prob.energy(shape)
        evals += 1
        return shape, bd

    base_shape = initial
    current = prob.prepare(initial)
    base_shape = current
    bd = prob.energy(current)
    evals += 1
    energy_now = bd.total_relaxed
    vec = prob.vector(current)

    traj = Trajectory(status="max_iterations", seed=config.seed)
    traj.records.append(IterationRecord(
        iteration=0, energy=energy_now, gradient_norm=math.nan, step=0.0,
        backtracks=0, volume=bd.volume, max_deformation=prob.deformation(current),
        breakdown=bd,
    ))

    precond = _mode_stiffness(prob, current, vec)

    h = config.gradient_step
    for it in range(1, config.max_iterations + 1):
        grad = np.zeros_like(vec)
        for j in range(vec.size):
            probe = vec.copy()
            probe[j] = vec[j] + h
            _, up = objective(probe)
            probe[j] = vec[j] - h
            _, dn = objective(probe)
            grad[j] = (up.total_relaxed - dn.total_relaxed) / (2.0 * h)
        gnorm = float(np.linalg.norm(grad))
        if gnorm <= config.gradient_tolerance:
            traj.status = "converged"
            break

        direction = -grad / precond
        slope = float(np.dot(grad, direction))
        step = config.initial_step
        accepted = None
        backtracks = 0
        for _ in range(config.max_backtracks):
            try:
                shape_t, bd_t = objective(vec + step * direction)
            except (ShapeError, NumericalError):
                step *= config.backtrack_factor
                backtracks += 1
                continue
            if bd_t.total_relaxed <= energy_now + config.armijo_slope * step * slope:
                accepted = (shape_t, bd_t)
                break
            step *= config.backtrack_factor
            backtracks += 1
        if accepted is None:
            traj.status = "stalled"
            break

        current, bd = accepted
        decrease = energy_now - bd.total_relaxed
        energy_now = bd.total_relaxed
        vec = prob.vector(current)
        base_shape = current
        traj.records.append(IterationRecord(
            iteration=it, energy=energy_now, gradient_norm=gnorm, step=step,
            backtracks=backtracks, volume=bd.volume,
            max_deformation=prob.deformation(current), breakdown=bd,
        ))
        if decrease < -1e-9:
            raise NumericalError("accepted step increased the energy")
        if decrease <= config.energy_tolerance:
            traj.status = "converged"
            break

    traj.distance_to_round = distance_to_round(current)
    traj.n_evaluations = evals
    return current, traj


def _mode_stiffness(prob, shape, vec) -> np.ndarray:
    """Diagonal preconditioner: measured curvature per harmonic degree.

    One second difference along a representative mode of each free degree.
    Degrees whose curvature is tiny or negative fall back to the largest
    measured stiffness so the preconditioner never amplifies a direction.
    """
    h = 1e-3
    base = prob.energy(prob.prepare(shape)).total_relaxed
    stiff = {}
    for deg in np.unique(prob.degrees):
        j = int(np.argmax(prob.degrees == deg))
        probe = vec.copy()
        probe[j] += h
        try:
            up = prob.energy(prob.prepare(prob.shape_from(shape, probe))).total_relaxed
            probe[j] = vec[j] - h
            dn = prob.energy(prob.prepare(prob.shape_from(shape, probe))).total_relaxed
        except (ShapeError, NumericalError):
            stiff[int(deg)] = math.nan
            continue
        stiff[int(deg)] = (up - 2.0 * base + dn) / (h * h)
    finite = [v for v in stiff.values() if math.isfinite(v) and v > 0.0]
    ceiling = max(finite) if finite else 1.0
    out = np.empty(vec.size)
    for i, deg in enumerate(prob.degrees):
        v = stiff[int(deg)]
        out[i] = v if (math.isfinite(v) and v > 1e-8 * ceiling) else ceiling
    return out


@dataclass(frozen=True)
class HessianAtBall:
    """Per-mode second differences of the projected energy at the ball.

    eigenvalue(Q) = geometric + Q^2 * capacitary per mode: the breakdown is
    linear in Q^2 at fixed shape, so this decomposition is exact, not a
    model fit.  halving gaps compare the h and h/2 estimates; large gaps
    flag noise-dominated differencing.
    """

    dimension: int
    degrees: np.ndarray
    orders: np.ndarray
    geometric: np.ndarray
    capacitary: np.ndarray
    halving_gap_geometric: np.ndarray
    halving_gap_capacitary: np.ndarray
    step: float
    warnings: tuple[str, ...]

    def eigenvalues(self, charge: float) -> np.ndarray:
        return self.geometric + charge**2 * self.capacitary

    def critical_charge(self, min_degree: int = 2) -> float:
        """Smallest charge at which some mode of degree >= min_degree flips.

        Bisection on the minimum eigenvalue; the stable bracket grows by
        doubling until instability appears.
        """
        sel = self.degrees >= min_degree
        if not np.any(sel):
            raise UsageError("no modes at or above the requested degree")
        geo = self.geometric[sel]
        cap = self.capacitary[sel]
        if np.min(geo) <= 0.0:
            raise NumericalError("shape is already unstable at zero charge")
        if np.min(cap) >= 0.0:
            raise NumericalError(
                "no destabilizing capacitary direction found; critical charge"
                " does not exist at this resolution"
            )

        def minimum_eigenvalue(q):
            return float(np.min(geo + q * q * cap))

        hi = 1.0
        while minimum_eigenvalue(hi) > 0.0:
            hi *= 2.0
            if hi > 2.0**60:
                raise NumericalError("instability threshold out of range")
        lo = 0.0
        while hi - lo > 1e-13 * hi:
            mid = 0.5 * (lo + hi)
            if minimum_eigenvalue(mid) > 0.0:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    def critical_degree(self, min_degree: int = 2) -> int:
        """Degree of the mode that crosses zero first."""
        q = self.critical_charge(min_degree)
        sel = self.degrees >= min_degree
        eigs = self.eigenvalues(q)[sel]
        return int(self.degrees[sel][np.argmin(eigs)])


def _hessian_modes_3d(max_degree, zonal_only):
    modes = []
    for l in range(1, max_degree + 1):
        orders = (0,) if zonal_only else range(-l, l + 1)
        for m in orders:
            modes.append((l, m))
    return modes


def hessian_at_ball(
    params: ModelParams,
    max_degree: int = 8,
    step: float = 1e-3,
    zonal_only: bool = False,
    rel_residual: float = 1e-12,
) -> HessianAtBall:
    """Stability spectrum of the round shape under the projected energy.

    For each harmonic mode, the energy along ball + t*mode (volume-projected)
    is sampled at t in {-h, -h/2, 0, h/2, h} and second-differenced.  The
    geometric part (curvature energies, plus perimeter in the plane) and the
    bare interaction energy are differenced separately, which gives the full
    charge dependence of every eigenvalue from one pass.  Degree-1 modes are
    included so translation neutrality is visible rather than assumed.

    By rotational symmetry the spectrum is independent of the order m;
    zonal_only=True exploits that for speed, the default measures every
    order as a symmetry check.
    """
    if max_degree < 2:
        raise UsageError("need modes of degree at least 2")
    target = params.effective_target()
    probe_params = replace(params, charge=1.0, eta=params.eta)

    if params.dimension == 3:
        field_grid = get_grid(max_degree)
        eval_grid = get_grid(max(16, params.quadrature_factor * max_degree))
        base = project_volume(ball_field(target, max_degree), target, grid=eval_grid)

        def sample(mode, t):
            l, m = mode
            c = base.coeffs.copy()
            c[l * l + l + m] += t
            shape = project_volume(SphereField(field_grid, c), target, grid=eval_grid)
            bd = evaluate(shape, probe_params, grid=eval_grid, rel_residual=rel_residual)
            return 0.25 * bd.bending, bd.interaction_value

        modes = _hessian_modes_3d(max_degree, zonal_only)
        f0 = sample((1, 0), 0.0)
    else:
        radius = math.sqrt(target / math.pi)
        degree = max(max_degree, 8)
        base_curve = CurveShape.circle(radius, degree)

        def sample(mode, t):
            k, kind = mode
            c = base_curve.coeffs.copy()
            c[2 * k - 1 if kind == 0 else 2 * k] += t
            shape = project_volume(
                CurveShape(degree, c, base_curve.base_radius, base_curve.n_samples),
                target,
            )
            bd = evaluate(shape, probe_params, rel_residual=rel_residual)
            geom = params.lambda_perimeter * bd.perimeter + bd.bending
            return geom, bd.interaction_value

        modes = [(k, kind)
                 for k in range(1, max_degree + 1)
                 for kind in ((0,) if zonal_only else (0, 1))]
        f0 = sample((1, 0), 0.0)

    degrees, orders = [], []
    geo, cap, gap_g, gap_c = [], [], [], []
    warnings = []
    h = step
    for mode in modes:
        gm, gh = {}, {}
        for t in (-h, -0.5 * h, 0.5 * h, h):
            g_val, i_val = sample(mode, t)
            gm[t] = g_val
            gh[t] = i_val
        d2g_c = (gm[h] - 2.0 * f0[0] + gm[-h]) / (h * h)
        d2g_f = (gm[0.5 * h] - 2.0 * f0[0] + gm[-0.5 * h]) / (0.25 * h * h)
        d2c_c = (gh[h] - 2.0 * f0[1] + gh[-h]) / (h * h)
        d2c_f = (gh[0.5 * h] - 2.0 * f0[1] + gh[-0.5 * h]) / (0.25 * h * h)
        degrees.append(mode[0])
        orders.append(mode[1])
        geo.append(d2g_f)
        cap.append(d2c_f)
        gap_g.append(abs(d2g_c - d2g_f))
        gap_c.append(abs(d2c_c - d2c_f))

    geo = np.asarray(geo)
    cap = np.asarray(cap)
    gap_g = np.asarray(gap_g)
    gap_c = np.asarray(gap_c)
    scale_g = float(np.max(np.abs(geo))) or 1.0
    scale_c = float(np.max(np.abs(cap))) or 1.0
    for i, (l, m) in enumerate(zip(degrees, orders)):
        if gap_g[i] > max(0.05 * abs(geo[i]), 1e-4 * scale_g) or \
           gap_c[i] > max(0.05 * abs(cap[i]), 1e-4 * scale_c):
            warnings.append(
                f"mode ({l},{m}): step-halving gap exceeds tolerance;"
                " second difference may be noise-dominated"
            )
    return HessianAtBall(
        dimension=params.dimension,
        degrees=np.asarray(degrees),
        orders=np.asarray(orders),
        geometric=geo,
        capacitary=cap,
        halving_gap_geometric=gap_g,
        halving_gap_capacitary=gap_c,
        step=step,
        warnings=tuple(warnings),
    )


@dataclass(frozen=True)
class ThresholdSweep:
    dimension: int
    alpha: float
    masses: np.ndarray
    critical_charges: np.ndarray
    critical_degrees: np.ndarray
    slope: float
    intercept: float


def threshold_sweep(
    params: ModelParams,
    masses,
    max_degree: int = 6,
    step: float = 1e-3,
) -> ThresholdSweep:
    """Instability threshold of the round shape as a function of mass.

    Runs the mode-spectrum analysis on the ball (disk) of each mass and
    bisects the critical charge, then fits log(critical charge) against
    log(mass).  The discretization dilates exactly with the shape, so in 3D
    the fitted slope reproduces the dilation scaling of the energy terms to
    near machine precision; deviations indicate a broken scaling somewhere
    in the pipeline rather than statistical error.
    """
    masses = np.asarray(list(masses), dtype=np.float64)
    if masses.size < 2:
        raise UsageError("need at least two masses to fit a slope")
    if np.any(masses <= 0.0):
        raise UsageError("masses must be positive")
    charges = np.empty(masses.size)
    degrees = np.empty(masses.size, dtype=np.int64)
    for i, m in enumerate(masses):
        p = replace(params, target_volume=float(m))
        hess = hessian_at_ball(p, max_degree=max_degree, step=step, zonal_only=True)
        charges[i] = hess.critical_charge()
        degrees[i] = hess.critical_degree()
    slope, intercept = np.polyfit(np.log(masses), np.log(charges), 1)
    return ThresholdSweep(
        dimension=params.dimension,
        alpha=params.alpha,
        masses=masses,
        critical_charges=charges,
        critical_degrees=degrees,
        slope=float(slope),
        intercept=float(intercept),
    )
