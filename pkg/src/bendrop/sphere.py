"""Band-limited fields on the unit sphere and graph-type surface geometry.

Scalar fields are represented in the real orthonormal spherical harmonic
basis.  With ``P[m,l]`` the orthonormalized associated Legendre function,

    Y(l, 0)  = P[0,l](theta)
    Y(l, m)  = sqrt(2) P[m,l](theta) cos(m phi)      (m > 0)
    Y(l, -m) = sqrt(2) P[m,l](theta) sin(m phi)      (m > 0)

so the constant function 1 has the single coefficient sqrt(4 pi) on (0, 0).
Coefficients are stored flat with index ``l*l + l + m``.

Grids pair Gauss-Legendre colatitudes with uniform longitudes, which makes
the discrete analysis of band-limited fields exact: products of two fields
of degree <= L are integrated exactly by the (L+1) x (2L+1) rule.

Surfaces are radial graphs ``x -> r (1 + phi(x)) x`` over the sphere.  All
derivatives are evaluated spectrally (never by node-local differencing), so
the colatitude nodes may approach the poles without artifacts; Gauss nodes
never contain the poles themselves.

Curvature sign convention: the second fundamental form is taken against the
outward normal with ``A(X, Y) = -(D_X Y) . nu``, so the unit sphere has
``A = id`` and mean curvature ``H = 2`` (a radius-2 sphere has ``H = 1``).
"""

from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field
from functools import lru_cache

import numpy as np

from . import _accel
from .errors import ShapeError, UsageError

__all__ = [
    "SphereGrid",
    "SphereField",
    "SurfaceGeometry",
    "get_grid",
    "surface_from_field",
    "area",
    "volume",
    "bending_energies",
    "bending_energy_gradient_route",
    "gauss_bonnet_defect",
    "li_yau_margin",
    "rotate_field",
    "random_band_field",
    "c1_norm",
    "MIN_RADIAL_FACTOR",
]

MIN_RADIAL_FACTOR = 0.05


def _legendre_tables(lmax: int, theta: np.ndarray):
    """Tables P[m, l, i], dP/dtheta and d2P/dtheta2 at the colatitudes."""
    nt = theta.size
    ct, st = np.cos(theta), np.sin(theta)
    P = np.zeros((lmax + 1, lmax + 1, nt))
    P[0, 0] = 0.5 / np.sqrt(np.pi)
    for m in range(1, lmax + 1):
        P[m, m] = -np.sqrt((2 * m + 1.0) / (2 * m)) * st * P[m - 1, m - 1]
    for m in range(lmax + 1):
        if m + 1 <= lmax:
            P[m, m + 1] = np.sqrt(2 * m + 3.0) * ct * P[m, m]
        for l in range(m + 2, lmax + 1):
            a = np.sqrt((4.0 * l * l - 1.0) / (l * l - m * m))
            b = np.sqrt(((l - 1.0) ** 2 - m * m) / (4.0 * (l - 1.0) ** 2 - 1.0))
            P[m, l] = a * (ct * P[m, l - 1] - b * P[m, l - 2])
    dP = np.zeros_like(P)
    for m in range(lmax + 1):
        for l in range(max(m, 1), lmax + 1):
            e = np.sqrt((l * l - m * m) * (2.0 * l + 1.0) / (2.0 * l - 1.0))
            below = P[m, l - 1] if l - 1 >= m else 0.0
            dP[m, l] = (l * ct * P[m, l] - e * below) / st
    d2P = np.zeros_like(P)
    for m in range(lmax + 1):
        for l in range(m, lmax + 1):
            d2P[m, l] = -(ct / st) * dP[m, l] - (l * (l + 1.0) - m * m / st**2) * P[m, l]
    return P, dP, d2P


class SphereGrid:
    """Gauss-Legendre x uniform-longitude quadrature grid with transforms."""

    def __init__(self, band_limit: int, n_theta: int | None = None, n_phi: int | None = None):
        if band_limit < 0:
            raise UsageError("band limit must be nonnegative")
        L = int(band_limit)
        nt = (L + 1) if n_theta is None else int(n_theta)
        np_ = (2 * L + 1) if n_phi is None else int(n_phi)
        if nt < L + 1 or np_ < 2 * L + 1:
            raise UsageError(
                f"grid {nt} x {np_} cannot resolve band limit {L}: "
                f"needs at least {L + 1} x {2 * L + 1} nodes"
            )
        self.band_limit = L
        x, wx = np.polynomial.legendre.leggauss(nt)
        order = np.argsort(-x)  # increasing theta
        self.theta = np.arccos(x[order])
        self.theta_weights = wx[order]
        self.n_theta = nt
        self.n_phi = np_
        self.phi = 2.0 * np.pi * np.arange(np_) / np_
        self.phi_weight = 2.0 * np.pi / np_
        self._P, self._dP, self._d2P = _legendre_tables(L, self.theta)
        m = np.arange(L + 1)
        self._cos = np.cos(np.outer(self.phi, m))
        self._sin = np.sin(np.outer(self.phi, m))
        self.sin_theta = np.sin(self.theta)
        self.cos_theta = np.cos(self.theta)
        # per-node quadrature weights for the round-sphere measure; sum = 4 pi
        self.weights = self.theta_weights[:, None] * np.full(np_, self.phi_weight)

    @property
    def n_nodes(self) -> int:
        return self.n_theta * self.n_phi

    @property
    def n_coeffs(self) -> int:
        return (self.band_limit + 1) ** 2

    def nodes_xyz(self) -> np.ndarray:
        st = self.sin_theta[:, None]
        ct = self.cos_theta[:, None]
        cp = np.cos(self.phi)[None, :]
        sp = np.sin(self.phi)[None, :]
        return np.stack([st * cp, st * sp, ct * np.ones_like(cp)], axis=-1)

    # -- coefficient layout helpers ------------------------------------

    def _split(self, coeffs: np.ndarray):
        """Flat coefficients -> (C, S) tables in [m, l] layout, sqrt2 folded."""
        L = self.band_limit
        C = np.zeros((L + 1, L + 1))
        S = np.zeros((L + 1, L + 1))
        sq2 = np.sqrt(2.0)
        for l in range(L + 1):
            base = l * l + l
            C[0, l] = coeffs[base]
            for m in range(1, l + 1):
                C[m, l] = sq2 * coeffs[base + m]
                S[m, l] = sq2 * coeffs[base - m]
        return C, S

    def _unsplit(self, C: np.ndarray, S: np.ndarray) -> np.ndarray:
        L = self.band_limit
        coeffs = np.zeros((L + 1) ** 2)
        inv = 1.0 / np.sqrt(2.0)
        for l in range(L + 1):
            base = l * l + l
            coeffs[base] = C[0, l]
            for m in range(1, l + 1):
                coeffs[base + m] = inv * C[m, l]
                coeffs[base - m] = inv * S[m, l]
        return coeffs

    # -- transforms -----------------------------------------------------

    def synthesize(self, coeffs: np.ndarray, dtheta: int = 0, dphi: int = 0) -> np.ndarray:
        """Evaluate a coefficient vector (or its derivative) on the grid."""
        coeffs = np.asarray(coeffs, dtype=np.float64)
        if coeffs.size != self.n_coeffs:
            raise UsageError(
                f"coefficient count {coeffs.size} does not match band limit "
                f"{self.band_limit} (expected {self.n_coeffs})"
            )
        table = (self._P, self._dP, self._d2P)[dtheta]
        C, S = self._split(coeffs)
        A = np.einsum("ml,mli->mi", C, table)
        B = np.einsum("ml,mli->mi", S, table)
        m = np.arange(self.band_limit + 1)
        if dphi == 1:
            A, B = m[:, None] * B, -m[:, None] * A
        elif dphi == 2:
            A, B = -(m * m)[:, None] * A, -(m * m)[:, None] * B
        elif dphi != 0:
            raise UsageError("phi derivative order must be 0, 1 or 2")
        return np.einsum("mi,jm->ij", A, self._cos) + np.einsum("mi,jm->ij", B, self._sin)

    def analyze(self, values: np.ndarray) -> np.ndarray:
        """Project grid values onto the harmonic basis (exact if band-limited)."""
        values = np.asarray(values, dtype=np.float64)
        if values.shape != (self.n_theta, self.n_phi):
            raise UsageError(
                f"value array shape {values.shape} does not match grid "
                f"{self.n_theta} x {self.n_phi}"
            )
        Fc = np.einsum("ij,jm->mi", values, self._cos) * self.phi_weight
        Fs = np.einsum("ij,jm->mi", values, self._sin) * self.phi_weight
        C = np.einsum("mli,mi,i->ml", self._P, Fc, self.theta_weights)
        S = np.einsum("mli,mi,i->ml", self._P, Fs, self.theta_weights)
        # cos^2(m phi) integrates to pi for m > 0 but 2 pi for m = 0; the
        # folded tables absorb the residual sqrt(2) inside _unsplit.
        C[1:] *= 2.0
        S[1:] *= 2.0
        return self._unsplit(C, S)

    def integrate(self, values: np.ndarray) -> float:
        """Quadrature against the round-sphere measure (weights sum to 4 pi)."""
        return float(np.sum(values * self.weights))


@lru_cache(maxsize=32)
def get_grid(band_limit: int) -> SphereGrid:
    """Shared grid cache; grids are immutable once built."""
    return SphereGrid(band_limit)


@dataclass
class SphereField:
    """A band-limited scalar field: a grid plus flat coefficients."""

    grid: SphereGrid
    coeffs: np.ndarray

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=np.float64)
        if self.coeffs.size != self.grid.n_coeffs:
            raise UsageError(
                f"field has {self.coeffs.size} coefficients, grid expects "
                f"{self.grid.n_coeffs}"
            )

    @classmethod
    def zero(cls, grid: SphereGrid) -> "SphereField":
        return cls(grid, np.zeros(grid.n_coeffs))

    @classmethod
    def from_values(cls, grid: SphereGrid, values: np.ndarray) -> "SphereField":
        return cls(grid, grid.analyze(values))

    def values(self) -> np.ndarray:
        return self.grid.synthesize(self.coeffs)

    def coefficient(self, l: int, m: int) -> float:
        return float(self.coeffs[l * l + l + m])

    def with_coefficient(self, l: int, m: int, value: float) -> "SphereField":
        c = self.coeffs.copy()
        c[l * l + l + m] = value
        return SphereField(self.grid, c)

    def pad_to(self, grid: SphereGrid) -> "SphereField":
        """Re-express on a finer grid (band limits must not shrink)."""
        if grid.band_limit < self.grid.band_limit:
            raise UsageError("cannot pad a field onto a coarser band limit")
        c = np.zeros(grid.n_coeffs)
        c[: self.coeffs.size] = self.coeffs
        return SphereField(grid, c)

    def degree_norms(self) -> np.ndarray:
        """l2 coefficient norm per degree."""
        L = self.grid.band_limit
        out = np.zeros(L + 1)
        for l in range(L + 1):
            sl = self.coeffs[l * l : (l + 1) ** 2]
            out[l] = np.sqrt(np.sum(sl * sl))
        return out


@dataclass
class SurfaceGeometry:
    """Pointwise geometry of a radial graph surface.

    ``metric`` and ``second_form`` are expressed against the pushforwards of
    the orthonormal sphere frame (e_theta, e_phi / sin theta), stored in
    ``tangent1``/``tangent2``; for the round sphere both forms are the
    identity.  ``area_element`` already contains the quadrature weight, so
    plain sums of ``f * area_element`` integrate over the surface.
    """

    grid: SphereGrid
    radius: float
    radial: np.ndarray            # u = radius * (1 + phi) at nodes
    position: np.ndarray          # (nt, np, 3)
    normal: np.ndarray            # outward unit normal
    tangent1: np.ndarray
    tangent2: np.ndarray
    metric: np.ndarray            # (nt, np, 2, 2), frame basis
    second_form: np.ndarray       # (nt, np, 2, 2), frame basis
    mean_curvature: np.ndarray
    gauss_curvature: np.ndarray
    area_element: np.ndarray      # weight-included surface measure per node
    _coord_metric: np.ndarray = dataclass_field(repr=False, default=None)
    _coord_second_form: np.ndarray = dataclass_field(repr=False, default=None)
    _map_hessian_normal: np.ndarray = dataclass_field(repr=False, default=None)


def surface_from_field(
    field: SphereField,
    radius: float = 1.0,
    grid: SphereGrid | None = None,
    oversample: int = 4,
) -> SurfaceGeometry:
    """Geometry of the surface ``x -> radius (1 + phi(x)) x``.

    Curvature integrands of a degree-L field are not band-limited, so by
    default they are evaluated on a grid with four times the field's band
    limit; pass ``grid`` or ``oversample`` to control quadrature resolution.
    """
    if radius <= 0:
        raise ShapeError("surface radius must be positive")
    if grid is None:
        target = max(field.grid.band_limit * max(int(oversample), 1), field.grid.band_limit)
        grid = get_grid(target)
    f = field if grid is field.grid else field.pad_to(grid)
    c = f.coeffs

    phi_v = grid.synthesize(c)
    low = 1.0 + phi_v.min()
    if low < MIN_RADIAL_FACTOR:
        raise ShapeError(
            f"radial factor 1 + phi reaches {low:.4f} < {MIN_RADIAL_FACTOR}; "
            "shape left the admissible graph class"
        )
    st = grid.sin_theta[:, None]
    ct = grid.cos_theta[:, None]
    cot = ct / st

    u = radius * (1.0 + phi_v)
    ut = radius * grid.synthesize(c, dtheta=1)
    ul = radius * grid.synthesize(c, dphi=1)
    utt = radius * grid.synthesize(c, dtheta=2)
    utl = radius * grid.synthesize(c, dtheta=1, dphi=1)
    ull = radius * grid.synthesize(c, dphi=2)

    v = ul / st          # phi-derivative against the unit-length frame vector
    w = utl / st
    ull_n = ull / st**2

    # Components against the local orthogonal triple (x_hat, e_theta, e_phi).
    # X = u x_hat;  X_1 = ut x_hat + u e_theta;  X_2 = v x_hat + u e_phi.
    E = ut * ut + u * u
    F = ut * v
    G = v * v + u * u
    n_r = u * u
    n_t = -ut * u
    n_p = -u * v
    nn = np.sqrt(n_r * n_r + n_t * n_t + n_p * n_p)

    # Frame second derivatives of the map (components in the same triple):
    # X_11 = (utt - u, 2 ut, 0)
    # X_12 = (w, v, ut + u cot)          [X_{theta phi} / sin theta]
    # X_22 = (ull_n - u, -u cot, 2 v)    [X_{phi phi} / sin^2 theta]
    b11 = -((utt - u) * n_r + 2.0 * ut * n_t) / nn
    b12 = -(w * n_r + v * n_t + (ut + u * cot) * n_p) / nn
    b22 = -((ull_n - u) * n_r - u * cot * n_t + 2.0 * v * n_p) / nn

    detg = E * G - F * F
    H = (G * b11 - 2.0 * F * b12 + E * b22) / detg
    K = (b11 * b22 - b12 * b12) / detg

    cp = np.cos(grid.phi)[None, :]
    sp = np.sin(grid.phi)[None, :]
    xhat = np.stack([st * cp, st * sp, ct * np.ones_like(cp)], axis=-1)
    e_th = np.stack([ct * cp, ct * sp, -st * np.ones_like(cp)], axis=-1)
    e_ph = np.stack([-sp * np.ones_like(st), cp * np.ones_like(st), np.zeros_like(st * cp)], axis=-1)

    position = u[..., None] * xhat
    tangent1 = ut[..., None] * xhat + u[..., None] * e_th
    tangent2 = v[..., None] * xhat + u[..., None] * e_ph
    normal = (n_r[..., None] * xhat + n_t[..., None] * e_th + n_p[..., None] * e_ph) / nn[..., None]

    metric = np.empty(E.shape + (2, 2))
    metric[..., 0, 0] = E
    metric[..., 0, 1] = metric[..., 1, 0] = F
    metric[..., 1, 1] = G
    second = np.empty_like(metric)
    second[..., 0, 0] = b11
    second[..., 0, 1] = second[..., 1, 0] = b12
    second[..., 1, 1] = b22

    area_el = nn * grid.weights

    # Coordinate-basis copies for the independent bending-energy route:
    # theta-phi coordinates rescale the frame by diag(1, sin theta).
    coord_metric = np.empty_like(metric)
    coord_metric[..., 0, 0] = E
    coord_metric[..., 0, 1] = coord_metric[..., 1, 0] = F * st
    coord_metric[..., 1, 1] = G * st * st
    coord_second = np.empty_like(metric)
    coord_second[..., 0, 0] = b11
    coord_second[..., 0, 1] = coord_second[..., 1, 0] = b12 * st
    coord_second[..., 1, 1] = b22 * st * st

    return SurfaceGeometry(
        grid=grid,
        radius=radius,
        radial=u,
        position=position,
        normal=normal,
        tangent1=tangent1,
        tangent2=tangent2,
        metric=metric,
        second_form=second,
        mean_curvature=H,
        gauss_curvature=K,
        area_element=area_el,
        _coord_metric=coord_metric,
        _coord_second_form=coord_second,
    )


def area(geom: SurfaceGeometry) -> float:
    return float(geom.area_element.sum())


def volume(geom: SurfaceGeometry) -> float:
    """Enclosed volume by the divergence identity (x . nu) / 3."""
    xdotn = np.einsum("ijk,ijk->ij", geom.position, geom.normal)
    return float(np.sum(xdotn * geom.area_element) / 3.0)


def bending_energies(geom: SurfaceGeometry) -> dict:
    """Integrals of H^2, |A|^2 and the traceless part |A - (H/2) g|^2.

    ``|A|^2`` is evaluated from the curvature invariants (H^2 - 2K); the
    companion :func:`bending_energy_gradient_route` recomputes it from the
    normal-gradient contraction and must agree to roundoff.
    """
    H2 = geom.mean_curvature**2
    A2 = H2 - 2.0 * geom.gauss_curvature
    dA = geom.area_element
    int_h2 = float(np.sum(H2 * dA))
    int_a2 = float(np.sum(A2 * dA))
    int_dev = float(np.sum((0.5 * H2 - 2.0 * geom.gauss_curvature) * dA))
    return {"h_squared": int_h2, "second_form_squared": int_a2, "traceless_squared": int_dev}


def bending_energy_gradient_route(geom: SurfaceGeometry) -> float:
    """``int |A|^2`` via the full metric contraction g^ik g^jl A_ij A_kl.

    Independent arithmetic route from :func:`bending_energies`: it contracts
    the coordinate second fundamental form with the explicit inverse metric
    rather than using the invariant identity H^2 - 2K.
    """
    g = geom._coord_metric
    b = geom._coord_second_form
    det = g[..., 0, 0] * g[..., 1, 1] - g[..., 0, 1] ** 2
    ginv = np.empty_like(g)
    ginv[..., 0, 0] = g[..., 1, 1] / det
    ginv[..., 1, 1] = g[..., 0, 0] / det
    ginv[..., 0, 1] = ginv[..., 1, 0] = -g[..., 0, 1] / det
    T = np.einsum("...ik,...kj->...ij", ginv, b)
    a2 = np.einsum("...ij,...ji->...", T, T)
    return float(np.sum(a2 * geom.area_element))


def gauss_bonnet_defect(geom: SurfaceGeometry) -> float:
    """(1/4) int H^2 - (1/4) int |A|^2 - 2 pi; zero for genus-0 graphs."""
    e = bending_energies(geom)
    return 0.25 * e["h_squared"] - 0.25 * e["second_form_squared"] - 2.0 * np.pi


def li_yau_margin(geom: SurfaceGeometry) -> float:
    """(1/4) int |A|^2 - 2 pi; nonnegative for embedded genus-0 surfaces."""
    e = bending_energies(geom)
    return 0.25 * e["second_form_squared"] - 2.0 * np.pi


def rotate_field(field: SphereField, rot: np.ndarray) -> SphereField:
    """Field composed with a rotation: returns analyze(phi(R^T x)) on the grid."""
    rot = np.asarray(rot, dtype=np.float64)
    xyz = field.grid.nodes_xyz().reshape(-1, 3)
    pre = xyz @ rot  # R^T applied to each node
    theta = np.arccos(np.clip(pre[:, 2], -1.0, 1.0))
    phi = np.arctan2(pre[:, 1], pre[:, 0])
    C, S = field.grid._split(field.coeffs)
    vals = _accel.point_synth(C, S, theta, phi)
    return SphereField.from_values(field.grid, vals.reshape(field.grid.n_theta, field.grid.n_phi))


def random_band_field(
    grid: SphereGrid,
    rng: np.random.Generator,
    degree_max: int,
    amplitude: float,
    degree_min: int = 1,
    norm: str = "sup",
) -> SphereField:
    """Random field with content in [degree_min, degree_max], rescaled so the
    sup (or C^1) norm equals ``amplitude``."""
    if degree_max > grid.band_limit:
        raise UsageError("requested content degree exceeds the grid band limit")
    coeffs = np.zeros(grid.n_coeffs)
    for l in range(degree_min, degree_max + 1):
        base = l * l + l
        for m in range(-l, l + 1):
            coeffs[base + m] = rng.normal()
    f = SphereField(grid, coeffs)
    cur = c1_norm(f) if norm == "c1" else float(np.abs(f.values()).max())
    if cur == 0.0:
        return f
    return SphereField(grid, coeffs * (amplitude / cur))


def c1_norm(field: SphereField) -> float:
    """sup |phi| + sup |grad phi| sampled on the field's grid."""
    g = field.grid
    vals = g.synthesize(field.coeffs)
    gt = g.synthesize(field.coeffs, dtheta=1)
    gp = g.synthesize(field.coeffs, dphi=1) / g.sin_theta[:, None]
    grad = np.sqrt(gt * gt + gp * gp)
    return float(np.abs(vals).max() + grad.max())
