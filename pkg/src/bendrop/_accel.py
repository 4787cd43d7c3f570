"""Computational kernels with a JIT lane and a pure-numpy lane.

The package spends almost all of its time in two places: assembling dense
pairwise interaction matrices (``pairwise_power`` plus the near-field pair
corrections) and evaluating band-limited expansions at scattered points
(``point_synth``).  Both have a numba implementation and a vectorized numpy
implementation with identical semantics.

Lane selection: the numba lane is used when numba imports cleanly and the
environment variable ``BENDROP_NO_NUMBA`` is unset/false.  ``set_lane`` can
force either lane at runtime (used by the benchmark and by tests).
"""

from __future__ import annotations

import os

import numpy as np

__all__ = [
    "HAS_NUMBA",
    "using_numba",
    "set_lane",
    "pairwise_power",
    "correct_surface_pairs",
    "correct_curve_pairs",
    "point_synth",
    "legendre_coeff_tables",
]

try:
    from numba import njit, prange

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - exercised via BENDROP_NO_NUMBA instead
    HAS_NUMBA = False

_DISABLED = os.environ.get("BENDROP_NO_NUMBA", "").strip().lower() in (
    "1",
    "true",
    "yes",
    "on",
)
_USE_NUMBA = HAS_NUMBA and not _DISABLED


def using_numba() -> bool:
    """Report whether the JIT lane is active."""
    return _USE_NUMBA


def set_lane(numba_lane: bool) -> None:
    """Force the JIT lane on or off (no-op request to enable without numba)."""
    global _USE_NUMBA
    _USE_NUMBA = bool(numba_lane) and HAS_NUMBA


# ---------------------------------------------------------------------------
# pairwise kernel matrix
# ---------------------------------------------------------------------------


def _pairwise_power_numpy(pts: np.ndarray, s: float) -> np.ndarray:
    n = pts.shape[0]
    out = np.empty((n, n))
    block = max(1, int(2**22 // max(n, 1)))
    for start in range(0, n, block):
        stop = min(n, start + block)
        diff = pts[start:stop, None, :] - pts[None, :, :]
        d2 = np.einsum("ijk,ijk->ij", diff, diff)
        for row in range(start, stop):
            d2[row - start, row] = 1.0
        out[start:stop] = d2 ** (-0.5 * s)
    np.fill_diagonal(out, 0.0)
    return out


if HAS_NUMBA:

    @njit(cache=True, parallel=True)
    def _pairwise_power_numba(pts, s):  # pragma: no cover - jitted
        n, dim = pts.shape
        out = np.zeros((n, n))
        for i in prange(n):
            for j in range(n):
                if i == j:
                    continue
                d2 = 0.0
                for k in range(dim):
                    t = pts[i, k] - pts[j, k]
                    d2 += t * t
                out[i, j] = d2 ** (-0.5 * s)
        return out


def pairwise_power(pts: np.ndarray, s: float) -> np.ndarray:
    """Dense matrix ``|p_i - p_j|^(-s)`` with a zero diagonal."""
    pts = np.ascontiguousarray(pts, dtype=np.float64)
    if _USE_NUMBA:
        return _pairwise_power_numba(pts, float(s))
    return _pairwise_power_numpy(pts, float(s))


# ---------------------------------------------------------------------------
# near-field pair corrections
# ---------------------------------------------------------------------------
#
# The centroid rule underestimates the interaction of adjacent elements where
# the kernel bends over the element extent.  For element pairs closer than
# cutoff * (r_i + r_j) the matrix entry is replaced by a small product
# quadrature over the two elements: a degree-3 disk rule for surface panels,
# a 3-point Gauss rule for curve segments.  Sub-point frames are built from
# the pair separation vector, so the correction commutes with rigid motions.
#
# Equal-measure model disks of adjacent panels overlap (panels tile, disks do
# not), which would let sub-points of the two rules collide and blow the
# entry past the diagonal, destroying positive definiteness.  For such pairs
# both rule radii are shrunk by min(1, _PAIR_SHRINK * d / (r_i + r_j)), which
# keeps every cross-rule point distance above a fixed fraction of the
# centroid distance.

_DISK_RING = np.sqrt(2.0 / 3.0)
_PAIR_SHRINK = 0.95
_GL3_X = np.array([-np.sqrt(3.0 / 5.0), 0.0, np.sqrt(3.0 / 5.0)])
_GL3_W = np.array([5.0 / 18.0, 4.0 / 9.0, 5.0 / 18.0])


def _disk_points_numpy(centers, normals, seps, radii):
    """Stacked 7-point disk rules; returns (m, 7, 3) points and (7,) weights."""
    n = normals / np.linalg.norm(normals, axis=1, keepdims=True)
    t1 = seps - np.einsum("ij,ij->i", seps, n)[:, None] * n
    nrm = np.linalg.norm(t1, axis=1)
    bad = nrm < 1e-12
    if np.any(bad):
        alt = np.zeros_like(t1[bad])
        pick = np.argmin(np.abs(n[bad]), axis=1)
        alt[np.arange(alt.shape[0]), pick] = 1.0
        alt -= np.einsum("ij,ij->i", alt, n[bad])[:, None] * n[bad]
        t1[bad] = alt
        nrm[bad] = np.linalg.norm(t1[bad], axis=1)
    t1 /= nrm[:, None]
    t2 = np.cross(n, t1)
    ang = np.pi * np.arange(6) / 3.0
    ring = (
        np.cos(ang)[None, :, None] * t1[:, None, :]
        + np.sin(ang)[None, :, None] * t2[:, None, :]
    )
    r = (_DISK_RING * radii)[:, None, None]
    pts = np.concatenate([centers[:, None, :], centers[:, None, :] + r * ring], axis=1)
    w = np.concatenate([[0.25], np.full(6, 0.125)])
    return pts, w


def _near_pairs_numpy(pts, radii, cutoff):
    """Upper-triangle index pairs with centroid distance < cutoff*(r_i+r_j),
    found blockwise to keep memory at O(block * n)."""
    n = pts.shape[0]
    rows, cols = [], []
    block = max(1, int(2**21 // max(n, 1)))
    for start in range(0, n, block):
        stop = min(n, start + block)
        diff = pts[start:stop, None, :] - pts[None, :, :]
        d2 = np.einsum("ijk,ijk->ij", diff, diff)
        cut = cutoff * (radii[start:stop, None] + radii[None, :])
        hit = d2 < cut * cut
        # keep strict upper triangle of the full matrix
        jidx = np.arange(n)[None, :]
        iidx = np.arange(start, stop)[:, None]
        hit &= jidx > iidx
        bi, bj = np.nonzero(hit)
        rows.append(bi + start)
        cols.append(bj)
    return np.concatenate(rows), np.concatenate(cols)


def _correct_surface_pairs_numpy(K, pts, normals, radii, s, cutoff):
    ii, jj = _near_pairs_numpy(pts, radii, cutoff)
    if ii.size == 0:
        return K
    sep = pts[jj] - pts[ii]
    d = np.linalg.norm(sep, axis=1)
    shrink = np.minimum(1.0, _PAIR_SHRINK * d / (radii[ii] + radii[jj]))
    pi, w = _disk_points_numpy(pts[ii], normals[ii], sep, shrink * radii[ii])
    pj, _ = _disk_points_numpy(pts[jj], normals[jj], -sep, shrink * radii[jj])
    dd = np.linalg.norm(pi[:, :, None, :] - pj[:, None, :, :], axis=-1)
    vals = np.einsum("a,b,pab->p", w, w, dd ** (-s))
    K[ii, jj] = vals
    K[jj, ii] = vals
    return K


if HAS_NUMBA:

    @njit(cache=True)
    def _disk_points_one_numba(center, normal, sep, radius, out):  # pragma: no cover
        nn = np.sqrt(normal[0] ** 2 + normal[1] ** 2 + normal[2] ** 2)
        n0, n1, n2 = normal[0] / nn, normal[1] / nn, normal[2] / nn
        dot = sep[0] * n0 + sep[1] * n1 + sep[2] * n2
        t10, t11, t12 = sep[0] - dot * n0, sep[1] - dot * n1, sep[2] - dot * n2
        tn = np.sqrt(t10 * t10 + t11 * t11 + t12 * t12)
        if tn < 1e-12:
            a0, a1, a2 = 0.0, 0.0, 0.0
            an0, an1, an2 = abs(n0), abs(n1), abs(n2)
            if an0 <= an1 and an0 <= an2:
                a0 = 1.0
            elif an1 <= an2:
                a1 = 1.0
            else:
                a2 = 1.0
            dot = a0 * n0 + a1 * n1 + a2 * n2
            t10, t11, t12 = a0 - dot * n0, a1 - dot * n1, a2 - dot * n2
            tn = np.sqrt(t10 * t10 + t11 * t11 + t12 * t12)
        t10, t11, t12 = t10 / tn, t11 / tn, t12 / tn
        t20 = n1 * t12 - n2 * t11
        t21 = n2 * t10 - n0 * t12
        t22 = n0 * t11 - n1 * t10
        out[0, 0], out[0, 1], out[0, 2] = center[0], center[1], center[2]
        r = _DISK_RING * radius
        for k in range(6):
            ang = np.pi * k / 3.0
            ca, sa = np.cos(ang), np.sin(ang)
            out[k + 1, 0] = center[0] + r * (ca * t10 + sa * t20)
            out[k + 1, 1] = center[1] + r * (ca * t11 + sa * t21)
            out[k + 1, 2] = center[2] + r * (ca * t12 + sa * t22)

    @njit(cache=True)
    def _correct_surface_pairs_numba(K, pts, normals, radii, s, cutoff):  # pragma: no cover
        n = pts.shape[0]
        w = np.empty(7)
        w[0] = 0.25
        for k in range(1, 7):
            w[k] = 0.125
        pi = np.empty((7, 3))
        pj = np.empty((7, 3))
        sep = np.empty(3)
        msep = np.empty(3)
        for i in range(n):
            for j in range(i + 1, n):
                d2 = 0.0
                for k in range(3):
                    t = pts[i, k] - pts[j, k]
                    d2 += t * t
                cut = cutoff * (radii[i] + radii[j])
                if d2 >= cut * cut:
                    continue
                for k in range(3):
                    sep[k] = pts[j, k] - pts[i, k]
                    msep[k] = -sep[k]
                shrink = _PAIR_SHRINK * np.sqrt(d2) / (radii[i] + radii[j])
                if shrink > 1.0:
                    shrink = 1.0
                _disk_points_one_numba(pts[i], normals[i], sep, shrink * radii[i], pi)
                _disk_points_one_numba(pts[j], normals[j], msep, shrink * radii[j], pj)
                acc = 0.0
                for a in range(7):
                    for b in range(7):
                        dd2 = 0.0
                        for k in range(3):
                            t = pi[a, k] - pj[b, k]
                            dd2 += t * t
                        acc += w[a] * w[b] * dd2 ** (-0.5 * s)
                K[i, j] = acc
                K[j, i] = acc
        return K


def correct_surface_pairs(K, pts, normals, radii, s, cutoff=2.0):
    """Replace near-pair entries of ``K`` by a two-disk product quadrature."""
    pts = np.ascontiguousarray(pts, dtype=np.float64)
    normals = np.ascontiguousarray(normals, dtype=np.float64)
    radii = np.ascontiguousarray(radii, dtype=np.float64)
    if _USE_NUMBA:
        return _correct_surface_pairs_numba(K, pts, normals, radii, float(s), float(cutoff))
    return _correct_surface_pairs_numpy(K, pts, normals, radii, float(s), float(cutoff))


def _correct_curve_pairs_numpy(K, pts, tangents, half_lengths, s, cutoff):
    ii, jj = _near_pairs_numpy(pts, half_lengths, cutoff)
    if ii.size == 0:
        return K
    ti = tangents[ii] / np.linalg.norm(tangents[ii], axis=1, keepdims=True)
    tj = tangents[jj] / np.linalg.norm(tangents[jj], axis=1, keepdims=True)
    d = np.linalg.norm(pts[jj] - pts[ii], axis=1)
    shrink = np.minimum(1.0, _PAIR_SHRINK * d / (half_lengths[ii] + half_lengths[jj]))
    hi = (shrink * half_lengths[ii])[:, None, None]
    hj = (shrink * half_lengths[jj])[:, None, None]
    pi = pts[ii][:, None, :] + _GL3_X[None, :, None] * hi * ti[:, None, :]
    pj = pts[jj][:, None, :] + _GL3_X[None, :, None] * hj * tj[:, None, :]
    dd = np.linalg.norm(pi[:, :, None, :] - pj[:, None, :, :], axis=-1)
    vals = np.einsum("a,b,pab->p", _GL3_W, _GL3_W, dd ** (-s))
    K[ii, jj] = vals
    K[jj, ii] = vals
    return K


if HAS_NUMBA:

    @njit(cache=True)
    def _correct_curve_pairs_numba(K, pts, tangents, half_lengths, s, cutoff):  # pragma: no cover
        n, dim = pts.shape
        gx = _GL3_X
        gw = _GL3_W
        pi = np.empty((3, 2))
        pj = np.empty((3, 2))
        for i in range(n):
            for j in range(i + 1, n):
                d2 = 0.0
                for k in range(dim):
                    t = pts[i, k] - pts[j, k]
                    d2 += t * t
                cut = cutoff * (half_lengths[i] + half_lengths[j])
                if d2 >= cut * cut:
                    continue
                tni = np.sqrt(tangents[i, 0] ** 2 + tangents[i, 1] ** 2)
                tnj = np.sqrt(tangents[j, 0] ** 2 + tangents[j, 1] ** 2)
                shrink = _PAIR_SHRINK * np.sqrt(d2) / (half_lengths[i] + half_lengths[j])
                if shrink > 1.0:
                    shrink = 1.0
                hi = shrink * half_lengths[i]
                hj = shrink * half_lengths[j]
                for a in range(3):
                    for k in range(2):
                        pi[a, k] = pts[i, k] + gx[a] * hi * tangents[i, k] / tni
                        pj[a, k] = pts[j, k] + gx[a] * hj * tangents[j, k] / tnj
                acc = 0.0
                for a in range(3):
                    for b in range(3):
                        dd2 = 0.0
                        for k in range(2):
                            t = pi[a, k] - pj[b, k]
                            dd2 += t * t
                        acc += gw[a] * gw[b] * dd2 ** (-0.5 * s)
                K[i, j] = acc
                K[j, i] = acc
        return K


def correct_curve_pairs(K, pts, tangents, half_lengths, s, cutoff=2.0):
    """Replace near-pair entries of ``K`` by a two-segment product quadrature."""
    pts = np.ascontiguousarray(pts, dtype=np.float64)
    tangents = np.ascontiguousarray(tangents, dtype=np.float64)
    half_lengths = np.ascontiguousarray(half_lengths, dtype=np.float64)
    if _USE_NUMBA:
        return _correct_curve_pairs_numba(K, pts, tangents, half_lengths, float(s), float(cutoff))
    return _correct_curve_pairs_numpy(K, pts, tangents, half_lengths, float(s), float(cutoff))


# ---------------------------------------------------------------------------
# scattered-point synthesis of band-limited expansions
# ---------------------------------------------------------------------------


def legendre_coeff_tables(lmax: int):
    """Recurrence coefficients for orthonormalized associated Legendre values.

    Returns ``(diag, off, arec, brec)`` where ``diag[m]`` advances the
    sectoral term, ``off[m]`` lifts degree m -> m+1 and ``arec/brec`` drive
    the three-term recurrence in l at fixed m.
    """
    m = np.arange(lmax + 1, dtype=np.float64)
    diag = np.sqrt((2 * m + 1) / np.maximum(2 * m, 1))
    off = np.sqrt(2 * m + 3)
    arec = np.zeros((lmax + 1, lmax + 1))
    brec = np.zeros((lmax + 1, lmax + 1))
    for mm in range(lmax + 1):
        for ll in range(mm + 2, lmax + 1):
            arec[mm, ll] = np.sqrt((4.0 * ll * ll - 1.0) / (ll * ll - mm * mm))
            brec[mm, ll] = np.sqrt(
                ((ll - 1.0) ** 2 - mm * mm) / (4.0 * (ll - 1.0) ** 2 - 1.0)
            )
    return diag, off, arec, brec


_INV_SQRT_4PI = 0.5 / np.sqrt(np.pi)


def _point_synth_numpy(C, S, theta, phi, tables):
    lmax = C.shape[0] - 1
    diag, off, arec, brec = tables
    ct, st = np.cos(theta), np.sin(theta)
    out = np.zeros_like(ct)
    pmm = np.full_like(ct, _INV_SQRT_4PI)
    for m in range(lmax + 1):
        if m > 0:
            pmm = -diag[m] * st * pmm
        cosm = np.cos(m * phi)
        sinm = np.sin(m * phi)
        pl_prev = pmm
        acc = (C[m, m] * cosm + S[m, m] * sinm) * pl_prev
        if m + 1 <= lmax:
            pl = off[m] * ct * pmm
            acc += (C[m, m + 1] * cosm + S[m, m + 1] * sinm) * pl
            for l in range(m + 2, lmax + 1):
                pl, pl_prev = arec[m, l] * (ct * pl - brec[m, l] * pl_prev), pl
                acc += (C[m, l] * cosm + S[m, l] * sinm) * pl
        out += acc
    return out


if HAS_NUMBA:

    @njit(cache=True, parallel=True)
    def _point_synth_numba(C, S, theta, phi, diag, off, arec, brec):  # pragma: no cover
        lmax = C.shape[0] - 1
        npts = theta.shape[0]
        out = np.zeros(npts)
        for p in prange(npts):
            ct = np.cos(theta[p])
            st = np.sin(theta[p])
            pmm = _INV_SQRT_4PI
            total = 0.0
            for m in range(lmax + 1):
                if m > 0:
                    pmm = -diag[m] * st * pmm
                cosm = np.cos(m * phi[p])
                sinm = np.sin(m * phi[p])
                pl_prev = pmm
                acc = (C[m, m] * cosm + S[m, m] * sinm) * pl_prev
                if m + 1 <= lmax:
                    pl = off[m] * ct * pmm
                    acc += (C[m, m + 1] * cosm + S[m, m + 1] * sinm) * pl
                    for l in range(m + 2, lmax + 1):
                        tmp = arec[m, l] * (ct * pl - brec[m, l] * pl_prev)
                        pl_prev = pl
                        pl = tmp
                        acc += (C[m, l] * cosm + S[m, l] * sinm) * pl
                total += acc
            out[p] = total
        return out


def point_synth(C, S, theta, phi, tables=None):
    """Evaluate ``sum_lm P[m,l](theta) (C cos(m phi) + S sin(m phi))`` pointwise.

    ``C``/``S`` are (lmax+1, lmax+1) coefficient tables in [m, l] layout with
    any angular normalization already folded in.
    """
    C = np.ascontiguousarray(C, dtype=np.float64)
    S = np.ascontiguousarray(S, dtype=np.float64)
    theta = np.ascontiguousarray(theta, dtype=np.float64)
    phi = np.ascontiguousarray(phi, dtype=np.float64)
    if tables is None:
        tables = legendre_coeff_tables(C.shape[0] - 1)
    if _USE_NUMBA:
        diag, off, arec, brec = tables
        return _point_synth_numba(C, S, theta, phi, diag, off, arec, brec)
    return _point_synth_numpy(C, S, theta, phi, tables)
