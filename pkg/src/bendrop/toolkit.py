"""Iteration-decay estimates and stability-inequality harnesses.

Two independent instruments used by the experiment layer:

* a constructive form of the geometric decay lemma: if a positive
  increasing ``psi`` satisfies ``psi(theta r) <= gamma psi(r) + forcing *
  r**delta`` on a dyadic-type ladder, then ``psi(r) <= C (r/r0)**beta
  (psi(r0) + forcing * r0**beta)`` with explicitly computed ``beta`` and
  ``C`` - plus a checker and a randomized audit of the implication;

* a harness that measures, on families of volume-normalized shapes, the
  three stability differences (bending excess, perimeter excess,
  interaction deficit) and the two bounded-ratio directions connecting
  them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .curves import CurveShape
from .energy import EnergyBreakdown, ModelParams, evaluate
from .errors import InputError, NumericalError, UsageError
from .sphere import SphereField

__all__ = [
    "DecayHypothesis",
    "decay_exponent",
    "verify_decay",
    "random_decay_audit",
    "stability_ratio_harness",
]


def _check_decay_ranges(theta: float, gamma: float, delta: float) -> None:
    if not 0.0 < theta < 1.0:
        raise UsageError(f"ladder ratio theta must lie in (0, 1), got {theta}")
    if not 0.0 < gamma < 1.0:
        raise UsageError(f"contraction factor gamma must lie in (0, 1), got {gamma}")
    if not 0.0 < delta < 1.0:
        raise UsageError(f"forcing exponent delta must lie in (0, 1), got {delta}")


@dataclass
class DecayHypothesis:
    """Parameters and sampled verification of the decay recurrence.

    ``psi`` is a positive increasing function on ``(0, r0]``; construction
    verifies ``psi(theta r) <= gamma psi(r) + forcing * r**delta`` on the
    ladder ``r_k = theta**k r0`` before the hypothesis may be used.
    """

    theta: float
    gamma: float
    delta: float
    forcing: float
    r0: float
    psi: Callable[[float], float]
    n_check: int = 60
    max_violation: float = field(init=False, default=0.0)

    def __post_init__(self):
        _check_decay_ranges(self.theta, self.gamma, self.delta)
        if self.forcing <= 0.0:
            raise UsageError(f"forcing constant must be positive, got {self.forcing}")
        if not 0.0 < self.r0 <= 1.0:
            raise UsageError(f"outer radius r0 must lie in (0, 1], got {self.r0}")
        radii = self.r0 * self.theta ** np.arange(self.n_check + 1)
        vals = np.array([float(self.psi(r)) for r in radii])
        if np.any(vals <= 0.0):
            raise InputError("psi must be positive on the sampled ladder")
        if np.any(np.diff(vals) > 1e-12 * np.abs(vals[:-1])):
            raise InputError("psi must be increasing on the sampled ladder")
        # recurrence check: psi(theta r_k) vs gamma psi(r_k) + forcing r_k^delta
        bound = self.gamma * vals[:-1] + self.forcing * radii[:-1] ** self.delta
        gap = vals[1:] - bound
        self.max_violation = float(gap.max())
        if self.max_violation > 1e-12 * max(1.0, float(vals.max())):
            raise InputError(
                f"decay recurrence violated on the sampled ladder by "
                f"{self.max_violation:.3e} (worst rung "
                f"k={int(np.argmax(gap))})"
            )

    def ladder(self, n: int | None = None) -> np.ndarray:
        k = self.n_check if n is None else int(n)
        return self.r0 * self.theta ** np.arange(k + 1)


def decay_exponent(theta: float, gamma: float, delta: float) -> tuple[float, float]:
    """Decay rate and constant for the iteration lemma.

    Picks ``beta`` at the midpoint of the admissible range,
    ``beta = min(delta, ln(gamma)/ln(theta)) / 2``, which strictly
    satisfies ``gamma < theta**beta`` and ``beta < delta``, and the
    smallest integer ``C`` closing the induction step
    ``gamma/theta**beta + 1/(C theta**beta) <= 1``, i.e.
    ``C = ceil(1 / (theta**beta - gamma))``.
    """
    _check_decay_ranges(theta, gamma, delta)
    beta = 0.5 * min(delta, math.log(gamma) / math.log(theta))
    C = float(math.ceil(1.0 / (theta**beta - gamma)))
    return beta, C


def verify_decay(
    hyp: DecayHypothesis, beta: float, C: float, n_samples: int = 60
) -> tuple[bool, float]:
    """Check the decay conclusion at the ladder radii ``r_k = theta**k r0``.

    Returns ``(holds, max_violation)`` where the violation is the largest
    value of ``psi(r_k) - C (r_k/r0)**beta (psi(r0) + forcing * r0**beta)``;
    nonpositive (up to roundoff) means the conclusion holds.
    """
    radii = hyp.ladder(n_samples)
    vals = np.array([float(hyp.psi(r)) for r in radii])
    envelope = C * (radii / hyp.r0) ** beta * (
        vals[0] + hyp.forcing * hyp.r0**beta
    )
    violation = float((vals - envelope).max())
    return violation <= 1e-12 * float(envelope[0]), violation


def random_decay_audit(
    n_instances: int = 10_000, n_steps: int = 60, seed: int = 0
) -> dict:
    """Vectorized audit: recurrence-satisfying ladders obey the conclusion.

    Draws random parameters, builds worst-case-leaning ladders
    ``psi_{k+1} = min(psi_k, u_k (gamma psi_k + forcing r_k**delta))`` with
    ``u_k`` uniform in [0, 1] (u_k = 1 saturates the recurrence), and
    checks the decay conclusion with the constructive ``(beta, C)`` on
    every instance.  Returns a summary dictionary.
    """
    rng = np.random.default_rng(seed)
    n = int(n_instances)
    theta = rng.uniform(0.05, 0.95, n)
    gamma = rng.uniform(0.05, 0.95, n)
    delta = rng.uniform(0.05, 0.95, n)
    forcing = rng.lognormal(0.0, 1.0, n)
    r0 = rng.uniform(0.1, 1.0, n)
    psi0 = rng.uniform(1e-2, 10.0, n)

    beta = 0.5 * np.minimum(delta, np.log(gamma) / np.log(theta))
    C = np.ceil(1.0 / (theta**beta - gamma))
    if not (np.all(gamma < theta**beta) and np.all(beta < delta)):
        raise NumericalError("decay exponent construction left its admissible range")

    psi = psi0.copy()
    radius = r0.copy()
    scale = C * (psi0 + forcing * r0**beta)
    worst = np.full(n, -np.inf)
    for k in range(1, n_steps + 1):
        u = rng.uniform(0.0, 1.0, n)
        psi = np.minimum(psi, u * (gamma * psi + forcing * radius**delta))
        radius *= theta
        envelope = scale * theta ** (k * beta)
        worst = np.maximum(worst, psi - envelope)
    ok = worst <= 1e-12 * scale
    return {
        "n_instances": n,
        "n_steps": n_steps,
        "all_hold": bool(np.all(ok)),
        "n_failures": int(np.sum(~ok)),
        "max_violation": float(worst.max()),
    }


def _harness_rows_3d(
    shapes: Sequence[SphereField], params: ModelParams
) -> tuple[list[dict], EnergyBreakdown]:
    grid = shapes[0].grid
    for s in shapes:
        if s.grid.band_limit != grid.band_limit:
            raise UsageError("all shapes in a family must share one band limit")
    base = evaluate(SphereField.zero(grid), params)
    rows = []
    for i, s in enumerate(shapes):
        bd = evaluate(s, params)
        if abs(bd.volume - base.volume) > 1e-8 * base.volume:
            raise UsageError(
                f"shape {i} is not volume-normalized: volume {bd.volume:.8f} "
                f"vs ball {base.volume:.8f}"
            )
        rows.append(
            {
                "index": i,
                "bending_excess": bd.willmore - base.willmore,
                "perimeter_excess": bd.perimeter - base.perimeter,
                "interaction_deficit": base.interaction_value - bd.interaction_value,
            }
        )
    return rows, base


def _harness_rows_2d(
    shapes: Sequence[CurveShape], params: ModelParams
) -> tuple[list[dict], EnergyBreakdown]:
    first = shapes[0]
    ref = CurveShape.circle(1.0, degree=first.degree, n_samples=first.n_samples)
    base = evaluate(ref, params)
    rows = []
    for i, s in enumerate(shapes):
        if s.n_samples != first.n_samples or s.degree != first.degree:
            raise UsageError("all curves in a family must share one discretization")
        bd = evaluate(s, params)
        if abs(bd.volume - base.volume) > 1e-8 * base.volume:
            raise UsageError(
                f"curve {i} is not area-normalized: area {bd.volume:.8f} "
                f"vs disk {base.volume:.8f}"
            )
        rows.append(
            {
                "index": i,
                "bending_excess": bd.willmore - base.willmore,
                "perimeter_excess": bd.perimeter - base.perimeter,
                "interaction_deficit": base.interaction_value - bd.interaction_value,
            }
        )
    return rows, base


def stability_ratio_harness(
    shapes: Sequence[SphereField] | Sequence[CurveShape],
    alpha: float,
    eta: float = 0.0,
    quadrature_factor: int = 4,
) -> tuple[list[dict], dict]:
    """Stability differences and bounded-ratio directions over a family.

    Every shape must be volume-normalized (3D fields) or area-normalized
    (2D curves).  Per shape the harness reports the bending excess
    W(E) - W(B), the perimeter excess P(E) - P(B) and the interaction
    deficit I(B) - I(E), all computed against a ball baseline at the
    identical discretization so discretization bias cancels in the
    differences.  Two ratio columns follow the two stability directions:
    perimeter excess per unit bending excess, and interaction deficit per
    unit perimeter excess.  Shapes indistinguishable from the ball are
    excluded from ratios.

    All three differences must be nonnegative (isoperimetry, bending
    minimality and interaction maximality of the ball); a negative value
    beyond tolerance raises NumericalError since it signals a geometry or
    quadrature bug.
    """
    if len(shapes) == 0:
        raise UsageError("stability harness needs at least one shape")
    dim = 3 if isinstance(shapes[0], SphereField) else 2
    params = ModelParams(
        dimension=dim,
        alpha=alpha,
        eta=eta,
        charge=1.0,
        quadrature_factor=quadrature_factor,
    )
    if dim == 3:
        rows, base = _harness_rows_3d(shapes, params)
    else:
        rows, base = _harness_rows_2d(shapes, params)

    scale = {
        "bending_excess": max(abs(base.willmore), 1.0),
        "perimeter_excess": base.perimeter,
        "interaction_deficit": base.interaction_value,
    }
    for row in rows:
        for key, ref in scale.items():
            if row[key] < -1e-12 * ref:
                raise NumericalError(
                    f"{key} is negative ({row[key]:.3e}) for shape "
                    f"{row['index']}: the ball must be optimal in this "
                    f"direction; check the discretization"
                )
        near_ball = (
            row["bending_excess"] <= 1e-12 * scale["bending_excess"]
            or row["perimeter_excess"] <= 1e-12 * scale["perimeter_excess"]
        )
        if near_ball:
            row["perimeter_per_bending"] = float("nan")
            row["interaction_per_perimeter"] = float("nan")
        else:
            row["perimeter_per_bending"] = (
                row["perimeter_excess"] / row["bending_excess"]
            )
            row["interaction_per_perimeter"] = (
                row["interaction_deficit"] / row["perimeter_excess"]
            )

    valid = [r for r in rows if np.isfinite(r["perimeter_per_bending"])]
    summary = {
        "dimension": dim,
        "alpha": alpha,
        "n_shapes": len(rows),
        "n_ratio_shapes": len(valid),
    }
    for key in ("perimeter_per_bending", "interaction_per_perimeter"):
        if valid:
            vals = np.array([r[key] for r in valid])
            mean = float(vals.mean())
            summary[f"max_{key}"] = float(vals.max())
            summary[f"spread_{key}"] = (
                float((vals.max() - vals.min()) / mean) if mean != 0.0 else float("inf")
            )
        else:
            summary[f"max_{key}"] = float("nan")
            summary[f"spread_{key}"] = float("nan")
    return rows, summary
