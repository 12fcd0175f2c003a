"""Scaled displacement monomials and polynomial stress bases.

All bases are written in the scaled coordinates ``xi = (x - xc)/h`` and
``eta = (y - yc)/h`` of an element with centroid ``xc`` and diameter ``h``.
Stress columns are Voigt triples (sxx, syy, sxy).  Divergences are returned in
physical derivatives, i.e. they carry the 1/h chain-rule factor.
"""

from __future__ import annotations

import numpy as np

# kind -> number of columns
KINDS = {
    "beta9": 9,
    "beta11": 11,
    "beta15": 15,
    "beta13_hybrid": 13,
    "beta12_penalty": 12,
}

DIVERGENCE_FREE = frozenset({"beta9", "beta11", "beta15"})

# Polynomial degree of each basis (sets quadrature orders).
DEGREE = {"beta9": 2, "beta11": 2, "beta15": 3, "beta13_hybrid": 2, "beta12_penalty": 2}


def scaled_coords(points, centroid, h):
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    xi = (pts[:, 0] - centroid[0]) / h
    eta = (pts[:, 1] - centroid[1]) / h
    return xi, eta


def monomials(xi, eta):
    """The 2x6 matrix of first-order vector monomials at each point.

    Returns an array of shape ``(n, 2, 6)`` with columns
    (1,0), (0,1), (-eta,xi), (eta,xi), (xi,0), (0,eta).
    """
    xi = np.atleast_1d(xi)
    eta = np.atleast_1d(eta)
    n = xi.shape[0]
    M = np.zeros((n, 2, 6))
    M[:, 0, 0] = 1.0
    M[:, 1, 1] = 1.0
    M[:, 0, 2] = -eta
    M[:, 1, 2] = xi
    M[:, 0, 3] = eta
    M[:, 1, 3] = xi
    M[:, 0, 4] = xi
    M[:, 1, 5] = eta
    return M


def eval_monomials(geom, point):
    xi, eta = scaled_coords(point, geom.centroid, geom.diameter)
    return monomials(xi, eta)[0]


def strain_of_monomials(h: float) -> np.ndarray:
    """Constant Voigt strains (xx, yy, 2xy) of the six monomials; shape (3, 6)."""
    S = np.zeros((3, 6))
    S[2, 3] = 2.0 / h
    S[0, 4] = 1.0 / h
    S[1, 5] = 1.0 / h
    return S


def eval_Smono(geom) -> np.ndarray:
    return strain_of_monomials(geom.diameter)


def _airy(xi, eta, k):
    n = xi.shape[0]
    P = np.zeros((n, 3, 15))
    D = np.zeros((n, 2, 15))  # scaled-coordinate divergence; zero by construction
    x, y = xi, eta
    x2, y2, xy = x * x, y * y, x * y
    P[:, 0, 0] = 1.0
    P[:, 1, 1] = 1.0
    P[:, 2, 2] = 1.0
    P[:, 0, 3] = y
    P[:, 1, 4] = x
    P[:, 0, 5] = x
    P[:, 2, 5] = -y
    P[:, 1, 6] = y
    P[:, 2, 6] = -x
    P[:, 1, 7] = 2 * xy
    P[:, 2, 7] = -x2
    P[:, 0, 8] = 2 * xy
    P[:, 2, 8] = -y2
    P[:, 0, 9] = -y2
    P[:, 1, 9] = x2
    P[:, 0, 10] = x2 - y2
    P[:, 1, 10] = y2 - x2
    P[:, 2, 10] = -2 * xy
    P[:, 0, 11] = x * (x2 - 6 * y2)
    P[:, 1, 11] = 3 * x * y2
    P[:, 2, 11] = -y * (3 * x2 - 2 * y2)
    P[:, 0, 12] = x * x2
    P[:, 1, 12] = -x * (2 * x2 - 3 * y2)
    P[:, 2, 12] = -3 * x2 * y
    P[:, 0, 13] = 3 * x2 * y
    P[:, 1, 13] = -y * (6 * x2 - y2)
    P[:, 2, 13] = x * (2 * x2 - 3 * y2)
    P[:, 0, 14] = y * (3 * x2 - 2 * y2)
    P[:, 1, 14] = y * y2
    P[:, 2, 14] = -3 * x * y2
    return P[:, :, :k], D[:, :, :k]


def _hybrid13(xi, eta):
    n = xi.shape[0]
    x, y = xi, eta
    P = np.zeros((n, 3, 13))
    D = np.zeros((n, 2, 13))
    for c in range(3):
        P[:, c, c] = 1.0
        P[:, c, 3 + c] = x
        P[:, c, 6 + c] = y
    # d/dx of sxx (col 3) and sxy (col 5); d/dy of syy (col 7) and sxy (col 8)
    D[:, 0, 3] = 1.0
    D[:, 1, 5] = 1.0
    D[:, 1, 7] = 1.0
    D[:, 0, 8] = 1.0
    P[:, 1, 9] = 2 * x * y
    P[:, 2, 9] = -x * x
    P[:, 0, 10] = 2 * x * y
    P[:, 2, 10] = -y * y
    P[:, 0, 11] = -y * y
    P[:, 1, 11] = x * x
    P[:, 0, 12] = x * x - y * y
    P[:, 1, 12] = y * y - x * x
    P[:, 2, 12] = -2 * x * y
    return P, D


def _penalty12(xi, eta):
    n = xi.shape[0]
    x, y = xi, eta
    P = np.zeros((n, 3, 12))
    D = np.zeros((n, 2, 12))
    for c in range(3):
        P[:, c, c] = 1.0
        P[:, c, 3 + c] = x
        P[:, c, 6 + c] = y
        P[:, c, 9 + c] = x * y
    # row 0: d(sxx)/dx + d(sxy)/dy ; row 1: d(sxy)/dx + d(syy)/dy
    D[:, 0, 3] = 1.0
    D[:, 0, 8] = 1.0
    D[:, 1, 5] = 1.0
    D[:, 1, 7] = 1.0
    D[:, 0, 9] = y
    D[:, 0, 11] = x
    D[:, 1, 11] = y
    D[:, 1, 10] = x
    return P, D


def stress_basis(kind: str, xi, eta, h: float):
    """Evaluate a stress basis and its physical divergence.

    Returns ``(P, divP)`` with shapes ``(n, 3, k)`` and ``(n, 2, k)``.
    """
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    eta = np.atleast_1d(np.asarray(eta, dtype=float))
    if kind in DIVERGENCE_FREE:
        P, D = _airy(xi, eta, KINDS[kind])
    elif kind == "beta13_hybrid":
        P, D = _hybrid13(xi, eta)
    elif kind == "beta12_penalty":
        P, D = _penalty12(xi, eta)
    else:
        raise ValueError(f"unknown stress basis kind {kind!r}")
    return P, D / h


def eval_stress_basis(kind: str, geom, point):
    """3 x k stress basis at a single physical point."""
    xi, eta = scaled_coords(point, geom.centroid, geom.diameter)
    P, _ = stress_basis(kind, xi, eta, geom.diameter)
    return P[0]


def eval_stress_divergence(kind: str, geom, point):
    xi, eta = scaled_coords(point, geom.centroid, geom.diameter)
    _, D = stress_basis(kind, xi, eta, geom.diameter)
    return D[0]
