"""Star-shaped closed plane curves via Fourier radius functions.

The boundary is ``theta -> r (1 + rho(theta)) (cos theta, sin theta)`` with
``rho`` a real trigonometric polynomial of degree K.  Coefficients are stored
flat as ``[a0, a1, b1, a2, b2, ...]`` for

    rho(theta) = a0 + sum_k  a_k cos(k theta) + b_k sin(k theta).

All derivatives are spectral and all integrals use the uniform trapezoid
rule, which is exact (to roundoff) for trigonometric polynomials, so the
curvature and length of band-limited shapes carry no grid bias beyond the
nonpolynomial square roots in the integrands.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ShapeError, UsageError

__all__ = [
    "CurveShape",
    "curve_measures",
    "curve_nodes",
    "rotate_curve",
    "random_curve",
    "curve_c1_norm",
    "MIN_CURVE_RADIAL_FACTOR",
]

MIN_CURVE_RADIAL_FACTOR = 0.05

DEFAULT_DEGREE = 64
DEFAULT_SAMPLES = 1024


@lru_cache(maxsize=16)
def _trig_tables(degree: int, n_samples: int):
    """cos(k theta_j) and sin(k theta_j) tables, k = 0..degree."""
    theta = 2.0 * np.pi * np.arange(n_samples) / n_samples
    k = np.arange(degree + 1)
    ang = np.outer(theta, k)
    return theta, np.cos(ang), np.sin(ang)


def _split(coeffs: np.ndarray, degree: int):
    a = np.zeros(degree + 1)
    b = np.zeros(degree + 1)
    a[0] = coeffs[0]
    for k in range(1, degree + 1):
        a[k] = coeffs[2 * k - 1]
        b[k] = coeffs[2 * k]
    return a, b


def _unsplit(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    degree = a.size - 1
    coeffs = np.zeros(2 * degree + 1)
    coeffs[0] = a[0]
    for k in range(1, degree + 1):
        coeffs[2 * k - 1] = a[k]
        coeffs[2 * k] = b[k]
    return coeffs


@dataclass
class CurveShape:
    """Fourier radius function plus base radius; boundary r(1+rho)(cos, sin)."""

    degree: int
    coeffs: np.ndarray
    base_radius: float = 1.0
    n_samples: int = DEFAULT_SAMPLES

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=np.float64)
        if self.degree < 0:
            raise UsageError("curve degree must be nonnegative")
        if self.coeffs.size != 2 * self.degree + 1:
            raise UsageError(
                f"curve with degree {self.degree} needs {2 * self.degree + 1} "
                f"coefficients, got {self.coeffs.size}"
            )
        if self.n_samples < 2 * self.degree + 1:
            raise UsageError(
                f"{self.n_samples} samples cannot resolve degree {self.degree}"
            )
        if self.base_radius <= 0:
            raise ShapeError("curve base radius must be positive")

    @classmethod
    def circle(cls, radius: float = 1.0, degree: int = DEFAULT_DEGREE,
               n_samples: int = DEFAULT_SAMPLES) -> "CurveShape":
        return cls(degree, np.zeros(2 * degree + 1), radius, n_samples)

    @classmethod
    def from_samples(cls, values: np.ndarray, degree: int,
                     base_radius: float = 1.0) -> "CurveShape":
        """Project uniform samples of rho onto degree-K trigonometric space."""
        values = np.asarray(values, dtype=np.float64)
        n = values.size
        if n < 2 * degree + 1:
            raise UsageError("too few samples for the requested degree")
        _, cos_t, sin_t = _trig_tables(degree, n)
        a = (values @ cos_t) * (2.0 / n)
        b = (values @ sin_t) * (2.0 / n)
        a[0] *= 0.5
        return cls(degree, _unsplit(a, b), base_radius, n)

    def cos_coeff(self, k: int) -> float:
        return float(self.coeffs[0] if k == 0 else self.coeffs[2 * k - 1])

    def sin_coeff(self, k: int) -> float:
        if k == 0:
            return 0.0
        return float(self.coeffs[2 * k])

    def thetas(self) -> np.ndarray:
        return _trig_tables(self.degree, self.n_samples)[0]

    def values(self, derivative: int = 0) -> np.ndarray:
        """rho, rho' or rho'' at the uniform sample angles."""
        _, cos_t, sin_t = _trig_tables(self.degree, self.n_samples)
        a, b = _split(self.coeffs, self.degree)
        k = np.arange(self.degree + 1, dtype=np.float64)
        if derivative == 0:
            return cos_t @ a + sin_t @ b
        if derivative == 1:
            return cos_t @ (k * b) - sin_t @ (k * a)
        if derivative == 2:
            return -(cos_t @ (k * k * a) + sin_t @ (k * k * b))
        raise UsageError("derivative order must be 0, 1 or 2")

    def degree_norms(self) -> np.ndarray:
        a, b = _split(self.coeffs, self.degree)
        return np.sqrt(a * a + b * b)


def _radius_values(shape: CurveShape):
    rho = shape.values()
    low = 1.0 + rho.min()
    if low < MIN_CURVE_RADIAL_FACTOR:
        raise ShapeError(
            f"radial factor 1 + rho reaches {low:.4f} < {MIN_CURVE_RADIAL_FACTOR}; "
            "curve left the admissible star-shaped class"
        )
    r = shape.base_radius
    R = r * (1.0 + rho)
    R1 = r * shape.values(1)
    R2 = r * shape.values(2)
    return R, R1, R2


def curve_measures(shape: CurveShape) -> dict:
    """Length, enclosed area and elastic energy (integral of kappa^2 ds).

    For the polar graph R(theta) the curvature is
    kappa = (R^2 + 2 R'^2 - R R'') / (R^2 + R'^2)^{3/2},
    positive for convex curves traversed counterclockwise.
    """
    R, R1, R2 = _radius_values(shape)
    speed = np.sqrt(R * R + R1 * R1)
    kappa = (R * R + 2.0 * R1 * R1 - R * R2) / speed**3
    w = 2.0 * np.pi / shape.n_samples
    return {
        "length": float(np.sum(speed) * w),
        "area": float(0.5 * np.sum(R * R) * w),
        "elastic": float(np.sum(kappa * kappa * speed) * w),
        "curvature": kappa,
        "speed": speed,
    }


def curve_nodes(shape: CurveShape, n: int | None = None):
    """Boundary points, unit tangents and arclength weights at n angles.

    Used to build boundary-panel discretizations: each node carries the
    arclength measure of its surrounding parameter cell (spectrally accurate
    midpoint-type rule for periodic integrands).
    """
    if n is None:
        n = shape.n_samples
    if n < 2 * shape.degree + 1:
        raise UsageError("too few panel nodes for the curve degree")
    work = shape if n == shape.n_samples else CurveShape(
        shape.degree, shape.coeffs, shape.base_radius, n
    )
    R, R1, _ = _radius_values(work)
    theta = work.thetas()
    ct, st = np.cos(theta), np.sin(theta)
    points = np.stack([R * ct, R * st], axis=-1)
    tx = R1 * ct - R * st
    ty = R1 * st + R * ct
    speed = np.sqrt(tx * tx + ty * ty)
    tangents = np.stack([tx / speed, ty / speed], axis=-1)
    weights = speed * (2.0 * np.pi / n)
    return points, tangents, weights


def rotate_curve(shape: CurveShape, angle: float) -> CurveShape:
    """Exact coefficient-space rotation: rho'(theta) = rho(theta - angle)."""
    a, b = _split(shape.coeffs, shape.degree)
    k = np.arange(shape.degree + 1, dtype=np.float64)
    ck, sk = np.cos(k * angle), np.sin(k * angle)
    return CurveShape(
        shape.degree,
        _unsplit(a * ck - b * sk, b * ck + a * sk),
        shape.base_radius,
        shape.n_samples,
    )


def random_curve(
    rng: np.random.Generator,
    degree_max: int,
    amplitude: float,
    degree: int = DEFAULT_DEGREE,
    degree_min: int = 1,
    base_radius: float = 1.0,
    norm: str = "sup",
    n_samples: int = DEFAULT_SAMPLES,
) -> CurveShape:
    """Random radius function with content in [degree_min, degree_max]."""
    if degree_max > degree:
        raise UsageError("content degree exceeds the representation degree")
    coeffs = np.zeros(2 * degree + 1)
    for k in range(max(degree_min, 1), degree_max + 1):
        coeffs[2 * k - 1] = rng.normal()
        coeffs[2 * k] = rng.normal()
    if degree_min == 0:
        coeffs[0] = rng.normal()
    shape = CurveShape(degree, coeffs, base_radius, n_samples)
    cur = curve_c1_norm(shape) if norm == "c1" else float(np.abs(shape.values()).max())
    if cur == 0.0:
        return shape
    return CurveShape(degree, coeffs * (amplitude / cur), base_radius, n_samples)


def curve_c1_norm(shape: CurveShape) -> float:
    return float(np.abs(shape.values()).max() + np.abs(shape.values(1)).max())
