"""Independent reference computations used by the tests.

Nothing here calls the package's quadrature or element code.
"""

import numpy as np
from numpy.polynomial import polynomial as npoly


def polygon_moment(xy, a, b):
    """Exact integral of x**a * y**b over a simple CCW polygon.

    Green's theorem turns the area integral into the boundary integral of
    x**(a+1) y**b / (a+1) dy; on each straight edge that is a polynomial in
    the edge parameter, integrated in closed form.
    """
    xy = np.asarray(xy, dtype=float)
    total = 0.0
    for p, q in zip(xy, np.roll(xy, -1, axis=0)):
        dx, dy = q - p
        px = npoly.polypow([p[0], dx], a + 1)
        py = npoly.polypow([p[1], dy], b)
        integrand = npoly.polymul(px, py) * dy / (a + 1)
        anti = npoly.polyint(integrand)
        total += npoly.polyval(1.0, anti) - npoly.polyval(0.0, anti)
    return total


def subdivided_midpoint(xy, f, depth=5):
    """Integrate ``f(x, y)`` over a polygon by fanning it from vertex 0 into
    triangles and applying the midpoint rule on ``4**depth`` sub-triangles
    of each.  Only for star-shaped polygons with respect to vertex 0 or for
    loose tolerances; accuracy is O(h^2)."""
    xy = np.asarray(xy, dtype=float)
    total = 0.0
    for i in range(1, len(xy) - 1):
        tris = [np.array([xy[0], xy[i], xy[i + 1]])]
        for _ in range(depth):
            new = []
            for t in tris:
                m01, m12, m20 = (t[0] + t[1]) / 2, (t[1] + t[2]) / 2, (t[2] + t[0]) / 2
                new += [np.array([t[0], m01, m20]), np.array([m01, t[1], m12]),
                        np.array([m20, m12, t[2]]), np.array([m01, m12, m20])]
            tris = new
        T = np.array(tris)
        c = T.mean(axis=1)
        e1, e2 = T[:, 1] - T[:, 0], T[:, 2] - T[:, 0]
        area = 0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])
        total += float(np.sum(area * f(c[:, 0], c[:, 1])))
    return total


def fd_strain(u, x, y, h=1e-6):
    """Voigt strain (exx, eyy, 2exy) of a displacement field by central differences."""
    ux_p, ux_m = np.asarray(u(x + h, y)), np.asarray(u(x - h, y))
    uy_p, uy_m = np.asarray(u(x, y + h)), np.asarray(u(x, y - h))
    dudx = (ux_p - ux_m) / (2 * h)
    dudy = (uy_p - uy_m) / (2 * h)
    return np.array([dudx[0], dudy[1], dudy[0] + dudx[1]])


def fd_divergence(sigma, x, y, h=1e-6):
    """Row-wise divergence of a Voigt stress field by central differences."""
    sx = (np.asarray(sigma(x + h, y)) - np.asarray(sigma(x - h, y))) / (2 * h)
    sy = (np.asarray(sigma(x, y + h)) - np.asarray(sigma(x, y - h))) / (2 * h)
    return np.array([sx[0] + sy[2], sx[2] + sy[1]])


def random_star_hexagon(rng, radius=(0.4, 1.0)):
    """A random hexagon that is star-shaped about the origin (hence simple)."""
    # jittered equal angles keep consecutive vertices apart
    ang = np.linspace(0, 2 * np.pi, 7)[:-1] + rng.uniform(-0.3, 0.3, 6)
    r = rng.uniform(*radius, 6)
    return np.column_stack([r * np.cos(ang), r * np.sin(ang)])


def plane_strain_C(E, nu):
    """Moduli matrix written out from Lame constants."""
    lam = E * nu / ((1 + nu) * (1 - 2 * nu))
    mu = E / (2 * (1 + nu))
    return np.array([[lam + 2 * mu, lam, 0], [lam, lam + 2 * mu, 0], [0, 0, mu]])
