"""Element operators for the stress-hybrid and penalty stress-hybrid VEM.

Element degrees of freedom are interleaved per node,
``(u0x, u0y, u1x, u1y, ..., u5x, u5y)``, matching the global numbering
``node i -> (2i, 2i+1)``.

The displacement inside an element is accessed only through the energy
projection onto the six linear vector monomials (``PiEps``).  The stress is
projected onto a polynomial basis ``P`` through the weak strain-displacement
relation, which gives ``H beta = L d`` (plus the equilibrium penalty terms
for the penalty formulation) and ``K = L^T H^{-1} L``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
import scipy.linalg as sla

from . import bases
from .material import MaterialLaw
from .mesh import ElementGeometry, polygon_geometry
from .quadrature import EdgeRule, PolygonRule, edge_rule, polygon_rule

# formulation kind -> (stress basis, stabilized, penalty)
FORMULATIONS = {
    "sh15": ("beta15", False, False),
    "sh11": ("beta11", False, False),
    "sh9": ("beta9", False, False),
    "sh13": ("beta13_hybrid", False, False),
    "psh12": ("beta12_penalty", False, True),
    "sh9_stab": ("beta9", True, False),
    "sh11_stab": ("beta11", True, False),
}

STABLE_KINDS = ("sh15", "psh12", "sh9_stab", "sh11_stab")


class ElementError(ArithmeticError):
    pass


@dataclass(frozen=True)
class Formulation:
    """Element formulation and its fixed parameters.

    ``alpha_mult`` overrides the default penalty parameter with
    ``alpha = alpha_mult * ell0**2``.
    """
    kind: str = "sh15"
    kappa: float = 1.0e4
    cap: float = 10.0
    tau: float = 0.5
    alpha_mult: Optional[float] = None

    def __post_init__(self):
        if self.kind not in FORMULATIONS:
            raise ValueError(f"unknown formulation {self.kind!r}; "
                             f"expected one of {sorted(FORMULATIONS)}")

    @property
    def basis(self) -> str:
        return FORMULATIONS[self.kind][0]

    @property
    def stabilized(self) -> bool:
        return FORMULATIONS[self.kind][1]

    @property
    def penalty(self) -> bool:
        return FORMULATIONS[self.kind][2]

    def alpha(self, law: MaterialLaw, geom: ElementGeometry) -> float:
        if not self.penalty:
            return 0.0
        if self.alpha_mult is not None:
            return self.alpha_mult * geom.ell0 ** 2
        return penalty_parameter(law.E_Y, geom.ell0, self.kappa, self.cap)


def as_formulation(f) -> Formulation:
    return f if isinstance(f, Formulation) else Formulation(str(f))


def penalty_parameter(E_Y: float, ell0: float, kappa: float = 1.0e4,
                      cap: float = 10.0) -> float:
    """``min(cap, kappa/E_Y) * ell0**2``."""
    return min(cap, kappa / E_Y) * ell0 ** 2


@dataclass
class ElementOperators:
    geom: ElementGeometry
    G: np.ndarray
    B: np.ndarray
    PiEps: np.ndarray
    H: np.ndarray
    Hp: np.ndarray
    L: np.ndarray
    Lp: np.ndarray
    PiBeta: np.ndarray
    K: np.ndarray
    f: np.ndarray
    alpha: float = 0.0
    beta_load: Optional[np.ndarray] = None  # -alpha (H+alpha Hp)^{-1} Lp

    def stress_coefficients(self, d) -> np.ndarray:
        beta = self.PiBeta @ np.asarray(d, dtype=float)
        if self.beta_load is not None:
            beta = beta + self.beta_load
        return beta


# ---------------------------------------------------------------------------
# building blocks


def _nodal_monomials(xy, geom):
    xi, eta = bases.scaled_coords(xy, geom.centroid, geom.diameter)
    return bases.monomials(xi, eta)  # (6, 2, 6)


def dof_matrix(xy, geom) -> np.ndarray:
    """12x6 matrix of nodal values of the six monomials (interleaved rows)."""
    return _nodal_monomials(xy, geom).reshape(12, 6)


def boundary_normal_weights(xy) -> np.ndarray:
    """``q_a = integral over the boundary of phi_a * n``; shape (6, 2).

    Exact because each hat function is linear on its two segments.
    """
    xy = np.asarray(xy, dtype=float)
    d = np.roll(xy, -1, axis=0) - xy
    nl = np.column_stack([d[:, 1], -d[:, 0]])  # normal times length
    return 0.5 * (nl + np.roll(nl, 1, axis=0))


def compute_G(xy, geom: ElementGeometry, law: MaterialLaw) -> np.ndarray:
    M = _nodal_monomials(xy, geom)
    S = bases.strain_of_monomials(geom.diameter)
    G = np.empty((6, 6))
    G[:3] = np.einsum("jca,jcm->am", M[:, :, :3], M) / 6.0
    G[3:] = geom.area * (S.T @ law.C @ S)[3:]
    return G


def compute_B(xy, geom: ElementGeometry, law: MaterialLaw) -> np.ndarray:
    M = _nodal_monomials(xy, geom)
    S = bases.strain_of_monomials(geom.diameter)
    B = np.empty((6, 12))
    B[:3] = M[:, :, :3].reshape(12, 3).T / 6.0
    sig = law.C @ S[:, 3:]  # constant stresses of m4..m6, (3, 3)
    q = boundary_normal_weights(xy)
    Bx = np.outer(sig[0], q[:, 0]) + np.outer(sig[2], q[:, 1])
    By = np.outer(sig[2], q[:, 0]) + np.outer(sig[1], q[:, 1])
    B[3:, 0::2] = Bx
    B[3:, 1::2] = By
    return B


def compute_PiEps(G, B) -> np.ndarray:
    try:
        lu = sla.lu_factor(G, check_finite=True)
    except (sla.LinAlgError, ValueError) as exc:
        raise ElementError("singular G matrix") from exc
    if np.min(np.abs(np.diag(lu[0]))) <= 1e-14 * np.max(np.abs(G)):
        raise ElementError("singular G matrix (degenerate node configuration)")
    return sla.lu_solve(lu, B)


def _basis_at(kind, pts, geom):
    xi, eta = bases.scaled_coords(pts, geom.centroid, geom.diameter)
    return bases.stress_basis(kind, xi, eta, geom.diameter)


def compute_H(kind: str, geom, law: MaterialLaw, rule: PolygonRule) -> np.ndarray:
    P, _ = _basis_at(kind, rule.points, geom)
    CP = np.einsum("ij,njk->nik", law.Cinv, P)
    H = np.einsum("n,nik,nil->kl", rule.weights, P, CP)
    return 0.5 * (H + H.T)


def compute_Hp(kind: str, geom, rule: PolygonRule) -> np.ndarray:
    k = bases.KINDS[kind]
    if kind in bases.DIVERGENCE_FREE:
        return np.zeros((k, k))
    _, D = _basis_at(kind, rule.points, geom)
    Hp = np.einsum("n,nik,nil->kl", rule.weights, D, D)
    return 0.5 * (Hp + Hp.T)


def compute_L(kind: str, xy, geom, erule: EdgeRule, PiEps=None,
              rule: Optional[PolygonRule] = None) -> np.ndarray:
    k = bases.KINDS[kind]
    L = np.zeros((k, 12))
    t = erule.t
    for s in range(6):
        P, _ = _basis_at(kind, erule.points[s], geom)   # (q, 3, k)
        nx, ny = erule.normals[s]
        PN_x = P[:, 0, :] * nx + P[:, 2, :] * ny        # (q, k)
        PN_y = P[:, 1, :] * ny + P[:, 2, :] * nx
        w = erule.weights[s]
        a, b = s, (s + 1) % 6
        for node, phi in ((a, 1.0 - t), (b, t)):
            wp = w * phi
            L[:, 2 * node] += wp @ PN_x
            L[:, 2 * node + 1] += wp @ PN_y
    if kind not in bases.DIVERGENCE_FREE:
        if PiEps is None or rule is None:
            raise ValueError("non divergence-free basis needs PiEps and a polygon rule")
        _, D = _basis_at(kind, rule.points, geom)
        xi, eta = bases.scaled_coords(rule.points, geom.centroid, geom.diameter)
        M = bases.monomials(xi, eta)                     # (n, 2, 6)
        DtM = np.einsum("n,nik,nim->km", rule.weights, D, M)
        L -= DtM @ PiEps
    return L


def compute_Lp(kind: str, geom, rule: PolygonRule, body_force=None) -> np.ndarray:
    k = bases.KINDS[kind]
    if body_force is None or kind in bases.DIVERGENCE_FREE:
        return np.zeros(k)
    _, D = _basis_at(kind, rule.points, geom)
    b = _eval_vector_field(body_force, rule.points)
    return np.einsum("n,nik,ni->k", rule.weights, D, b)


def _eval_vector_field(fn, pts) -> np.ndarray:
    out = np.asarray(fn(pts[:, 0], pts[:, 1]), dtype=float)
    if out.shape == (2,):
        out = np.broadcast_to(out, (len(pts), 2))
    elif out.shape[0] == 2 and out.ndim == 2 and out.shape[1] == len(pts):
        out = out.T
    return np.asarray(out, dtype=float).reshape(len(pts), 2)


def _spd_solve(A, rhs, what="H"):
    try:
        c = sla.cho_factor(A, check_finite=True)
    except (sla.LinAlgError, ValueError) as exc:
        raise ElementError(f"{what} is not symmetric positive-definite") from exc
    d = np.diag(c[0]) ** 2
    if d.min() <= 1e-14 * d.max():
        raise ElementError(f"{what} is numerically singular")
    return sla.cho_solve(c, rhs)


def stiffness_sh(H, L):
    """Return ``(PiBeta, K)`` with ``PiBeta = H^{-1} L`` and ``K = L^T PiBeta``."""
    PiBeta = _spd_solve(H, L)
    K = L.T @ PiBeta
    return PiBeta, 0.5 * (K + K.T)


def stiffness_psh(H, Hp, L, Lp, alpha: float):
    """Penalty stiffness and the penalty part of the element force.

    Returns ``(PiBeta, K, f_penalty, beta_load)`` where the stress
    coefficients are ``PiBeta @ d + beta_load``.
    """
    A = H + alpha * Hp
    sol = _spd_solve(A, np.column_stack([L, Lp]), "H + alpha*Hp")
    PiBeta = sol[:, :12]
    ALp = sol[:, 12]
    K = L.T @ PiBeta
    f_pen = alpha * (L.T @ ALp)
    return PiBeta, 0.5 * (K + K.T), f_pen, -alpha * ALp


def stabilization_KS(xy, geom, tau: float = 0.5) -> np.ndarray:
    """``tau * (I - D (D^T D)^{-1} D^T)``, a scaled orthogonal projector."""
    D = dof_matrix(xy, geom)
    DtD = D.T @ D
    if np.linalg.matrix_rank(DtD) < 6:
        raise ElementError("rank-deficient nodal monomial matrix")
    return tau * (np.eye(12) - D @ np.linalg.solve(DtD, D.T))


def body_force_vector(xy, geom, PiEps, rule: PolygonRule, body_force) -> np.ndarray:
    """``integral of (M PiEps)^T b`` over the element."""
    if body_force is None:
        return np.zeros(12)
    xi, eta = bases.scaled_coords(rule.points, geom.centroid, geom.diameter)
    M = bases.monomials(xi, eta)
    b = _eval_vector_field(body_force, rule.points)
    Mb = np.einsum("n,nim,ni->m", rule.weights, M, b)
    return PiEps.T @ Mb


def traction_vector(xy, erule: EdgeRule, edges, traction) -> np.ndarray:
    """Consistent nodal loads of a traction on the listed local edges.

    ``traction(x, y, nx, ny)`` returns the traction vector at the points.
    """
    f = np.zeros(12)
    t = erule.t
    for s in edges:
        pts = erule.points[s]
        nx, ny = erule.normals[s]
        tr = np.asarray(traction(pts[:, 0], pts[:, 1], np.full(len(pts), nx),
                                 np.full(len(pts), ny)), dtype=float)
        if tr.shape == (2,):
            tr = np.broadcast_to(tr, (len(pts), 2))
        elif tr.shape == (2, len(pts)):
            tr = tr.T
        w = erule.weights[s]
        a, b = s, (s + 1) % 6
        for node, phi in ((a, 1.0 - t), (b, t)):
            f[2 * node:2 * node + 2] += (w * phi) @ tr
    return f


def force_vector(xy, geom, PiEps, rule, erule, body_force=None,
                 traction_edges=(), traction=None) -> np.ndarray:
    f = body_force_vector(xy, geom, PiEps, rule, body_force)
    if traction_edges:
        if traction is None:
            raise ValueError("traction edges given without a traction function")
        f = f + traction_vector(xy, erule, traction_edges, traction)
    return f


# ---------------------------------------------------------------------------


def element_operators(xy, law: MaterialLaw, formulation="sh15", body_force=None,
                      traction_edges=(), traction: Optional[Callable] = None,
                      geom: Optional[ElementGeometry] = None) -> ElementOperators:
    """All element matrices for one six-noded element with coordinates ``xy``."""
    form = as_formulation(formulation)
    xy = np.asarray(xy, dtype=float)
    if xy.shape != (6, 2):
        raise ElementError(f"element arity {xy.shape[0]} != 6")
    geom = polygon_geometry(xy) if geom is None else geom
    if not (np.isfinite(geom.area) and geom.area > 0.0):
        raise ElementError("degenerate element: non-positive area")
    kind = form.basis
    deg = bases.DEGREE[kind]
    rule = polygon_rule(xy, max(2 * deg, 2), geom.centroid)
    erule = edge_rule(xy, deg + 1)

    G = compute_G(xy, geom, law)
    B = compute_B(xy, geom, law)
    PiEps = compute_PiEps(G, B)
    H = compute_H(kind, geom, law, rule)
    Hp = compute_Hp(kind, geom, rule)
    L = compute_L(kind, xy, geom, erule, PiEps, rule)

    alpha = form.alpha(law, geom)
    beta_load = None
    if form.penalty:
        load_rule = rule if body_force is None else polygon_rule(xy, 8, geom.centroid)
        Lp = compute_Lp(kind, geom, load_rule, body_force)
        PiBeta, K, f_pen, beta_load = stiffness_psh(H, Hp, L, Lp, alpha)
    else:
        Lp = np.zeros(bases.KINDS[kind])
        PiBeta, K = stiffness_sh(H, L)
        f_pen = 0.0
    if form.stabilized:
        K = K + stabilization_KS(xy, geom, form.tau)

    f = f_pen
    if body_force is not None or traction_edges:
        frule = polygon_rule(xy, 8, geom.centroid) if body_force is not None else rule
        f = f + force_vector(xy, geom, PiEps, frule, erule, body_force,
                             traction_edges, traction)
    f = np.zeros(12) + f
    return ElementOperators(geom, G, B, PiEps, H, Hp, L, Lp, PiBeta, K, f,
                            alpha, beta_load)


def element_stiffness(xy, law, formulation="sh15") -> np.ndarray:
    return element_operators(xy, law, formulation).K
