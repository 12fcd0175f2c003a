"""Polynomial-exact integration over six-noded polygons and their edges.

Polygons are split into triangles (a fan from the centroid when every fan
triangle is positively oriented, ear clipping otherwise) and each triangle
carries a collapsed Gauss product rule.  Edges use Gauss-Legendre points.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi


class QuadratureError(ValueError):
    pass


@dataclass(frozen=True)
class PolygonRule:
    points: np.ndarray   # (n, 2) physical coordinates
    weights: np.ndarray  # (n,)

    def integrate(self, values):
        return np.tensordot(self.weights, values, axes=(0, 0))


@dataclass(frozen=True)
class EdgeRule:
    """Gauss points on each straight boundary segment of a polygon.

    ``points[s]``, ``weights[s]`` belong to segment ``s`` running from vertex
    ``s`` to vertex ``s+1``; ``t`` is the local coordinate in [0, 1] so that
    the hat functions of the two end vertices are ``1-t`` and ``t``.
    """
    points: np.ndarray   # (6, q, 2)
    t: np.ndarray        # (q,)
    weights: np.ndarray  # (6, q) physical, i.e. include segment length
    normals: np.ndarray  # (6, 2) outward unit normals
    lengths: np.ndarray  # (6,)


@lru_cache(maxsize=None)
def _reference_triangle_rule(degree: int):
    """Collapsed (Duffy) Gauss rule on the triangle (0,0),(1,0),(0,1)."""
    n = degree // 2 + 1
    # s in [0,1] along the collapsed direction carries weight (1-s)
    xs, ws = roots_jacobi(n, 1.0, 0.0)
    s = 0.5 * (xs + 1.0)
    ws = ws / 4.0
    xt, wt = np.polynomial.legendre.leggauss(n)
    t = 0.5 * (xt + 1.0)
    wt = wt / 2.0
    S, T = np.meshgrid(s, t, indexing="ij")
    W = np.outer(ws, wt)
    r = S.ravel()
    q = ((1.0 - S) * T).ravel()
    return np.column_stack([r, q]), W.ravel()


def signed_area(xy) -> float:
    x, y = xy[:, 0], xy[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def polygon_centroid(xy):
    x, y = xy[:, 0], xy[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    cr = x * yn - xn * y
    A = 0.5 * cr.sum()
    if A == 0.0:
        raise QuadratureError("polygon has zero area")
    cx = ((x + xn) * cr).sum() / (6.0 * A)
    cy = ((y + yn) * cr).sum() / (6.0 * A)
    return np.array([cx, cy])


def _tri_area(a, b, c):
    return 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))


def _ear_clip(xy):
    idx = list(range(len(xy)))
    tris = []
    guard = 0
    while len(idx) > 3:
        guard += 1
        if guard > 100:
            raise QuadratureError("ear clipping failed; polygon is not simple")
        m = len(idx)
        for k in range(m):
            ia, ib, ic = idx[k - 1], idx[k], idx[(k + 1) % m]
            a, b, c = xy[ia], xy[ib], xy[ic]
            if _tri_area(a, b, c) <= 0.0:
                continue
            ok = True
            for j in idx:
                if j in (ia, ib, ic):
                    continue
                p = xy[j]
                if (_tri_area(a, b, p) >= 0 and _tri_area(b, c, p) >= 0
                        and _tri_area(c, a, p) >= 0):
                    ok = False
                    break
            if ok:
                tris.append((ia, ib, ic))
                idx.pop(k)
                break
        else:
            raise QuadratureError("ear clipping failed; polygon is not simple")
    tris.append(tuple(idx))
    return [xy[list(t)] for t in tris]


def triangulate(xy, centroid=None):
    """Split a CCW simple polygon into positively oriented triangles."""
    xy = np.asarray(xy, dtype=float)
    scale = max(np.ptp(xy[:, 0]), np.ptp(xy[:, 1])) ** 2
    if not signed_area(xy) > 1e-14 * scale:
        raise QuadratureError("polygon has non-positive area")
    c = polygon_centroid(xy) if centroid is None else np.asarray(centroid)
    n = len(xy)
    fan = [np.array([c, xy[i], xy[(i + 1) % n]]) for i in range(n)]
    if all(_tri_area(*t) > 1e-14 * scale for t in fan):
        return fan
    # drop exactly collinear vertices (midside nodes) before clipping
    keep = [i for i in range(n)
            if abs(_tri_area(xy[i - 1], xy[i], xy[(i + 1) % n])) > 1e-14 * scale]
    return _ear_clip(xy[keep])


def polygon_rule(xy, degree: int = 8, centroid=None) -> PolygonRule:
    """Quadrature rule exact for polynomials of total degree ``degree``."""
    ref_pts, ref_w = _reference_triangle_rule(degree)
    pts, wts = [], []
    for a, b, c in triangulate(xy, centroid):
        J = np.column_stack([b - a, c - a])
        det = J[0, 0] * J[1, 1] - J[0, 1] * J[1, 0]
        pts.append(a + ref_pts @ J.T)
        wts.append(ref_w * det)
    return PolygonRule(np.vstack(pts), np.concatenate(wts))


@lru_cache(maxsize=None)
def _gauss01(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


def edge_rule(xy, degree: int = 5) -> EdgeRule:
    xy = np.asarray(xy, dtype=float)
    t, w = _gauss01(degree // 2 + 1)
    a = xy
    b = np.roll(xy, -1, axis=0)
    d = b - a
    lengths = np.hypot(d[:, 0], d[:, 1])
    if np.any(lengths <= 0.0):
        raise QuadratureError("zero-length boundary segment")
    normals = np.column_stack([d[:, 1], -d[:, 0]]) / lengths[:, None]
    points = a[:, None, :] + t[None, :, None] * d[:, None, :]
    weights = lengths[:, None] * w[None, :]
    return EdgeRule(points, t, weights, normals, lengths)
