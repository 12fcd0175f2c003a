"""Element eigenvalue studies, error norms, rate fitting and field recovery."""

from __future__ import annotations

import csv
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from . import bases
from .element import ElementError, as_formulation, element_operators
from .material import MaterialLaw, hydrostatic_from_voigt
from .mesh import Mesh, six_noded_triangle
from .quadrature import QuadratureError, polygon_rule
from .system import FieldSolution, element_dof_indices

# Right isosceles six-noded triangle used for single-element spectra.
REGULAR_TRIANGLE = six_noded_triangle((-1.0, 0.0), (1.0, 0.0), (0.0, 1.0))

# A six-noded triangle whose midside nodes are pulled inward, giving three
# reflex vertices.  Used as the nonconvex single-element spectrum fixture.
NONCONVEX_HEXAGON = np.array([
    [0.0, 0.0], [0.95, 0.35], [2.0, 0.0], [1.35, 0.53], [1.05, 1.5], [0.66, 0.54],
])


def element_eigenvalues(xy, law: MaterialLaw, formulation="sh15") -> np.ndarray:
    """Ascending eigenvalues of the symmetrized element stiffness."""
    K = element_operators(xy, law, formulation).K
    return np.linalg.eigvalsh(0.5 * (K + K.T))


def largest_eigenvalues(xy, law, formulation="sh15", count: int = 5) -> np.ndarray:
    """The ``count`` largest eigenvalues, ascending."""
    return element_eigenvalues(xy, law, formulation)[-count:]


def stiff_mode_count(eigs, ratio: float = 1e5) -> int:
    """Number of eigenvalues larger than ``ratio`` times the sixth-largest."""
    e = np.sort(np.asarray(eigs))[::-1]
    return int(np.sum(e > ratio * e[5]))


@dataclass
class EigenScan:
    formulation: str
    g1: np.ndarray
    g2: np.ndarray
    eig4: np.ndarray            # (len(g1), len(g2)), NaN where missing
    trace: np.ndarray
    missing: list = field(default_factory=list)

    def relative(self) -> np.ndarray:
        return self.eig4 / self.trace

    def min(self) -> float:
        return float(np.nanmin(self.eig4))

    def max(self) -> float:
        return float(np.nanmax(self.eig4))

    def spurious_points(self, tol: float = 1e-8) -> int:
        """Grid points whose fourth eigenvalue is below ``tol * trace(K)``."""
        r = self.relative()
        return int(np.sum(r[np.isfinite(r)] < tol))

    def rows(self):
        for i, a in enumerate(self.g1):
            for j, b in enumerate(self.g2):
                yield float(a), float(b), float(self.eig4[i, j])


def _scan_row(args):
    form, law, g1, g2s = args
    eig4 = np.full(len(g2s), np.nan)
    tr = np.full(len(g2s), np.nan)
    missing = []
    for j, g2 in enumerate(g2s):
        xy = six_noded_triangle((-1.0, 0.0), (1.0, 0.0), (g1, g2))
        try:
            K = element_operators(xy, law, form).K
        except (ElementError, QuadratureError, np.linalg.LinAlgError):
            missing.append((float(g1), float(g2)))
            continue
        e = np.linalg.eigvalsh(0.5 * (K + K.T))
        eig4[j] = e[3]
        tr[j] = np.trace(K)
    return eig4, tr, missing


def eigen_scan(formulation, law: MaterialLaw, g1_range=(-10.0, 10.0),
               g2_range=(0.05, 10.0), resolution=100, workers: int = 1) -> EigenScan:
    """Fourth-smallest stiffness eigenvalue over triangles (-1,0),(1,0),(g1,g2).

    ``resolution`` is an int or a ``(n1, n2)`` pair.  Points where the
    element cannot be built are recorded in ``missing`` and left as NaN.
    """
    n1, n2 = (resolution, resolution) if np.isscalar(resolution) else resolution
    if n1 < 2 or n2 < 2:
        raise ValueError("resolution must be at least 2 per axis")
    form = as_formulation(formulation)
    g1 = np.linspace(*g1_range, n1)
    g2 = np.linspace(*g2_range, n2)
    jobs = [(form, law, float(a), g2) for a in g1]
    if workers > 1:
        with ProcessPoolExecutor(workers) as ex:
            out = list(ex.map(_scan_row, jobs, chunksize=max(1, n1 // (4 * workers))))
    else:
        out = [_scan_row(j) for j in jobs]
    eig4 = np.array([o[0] for o in out])
    tr = np.array([o[1] for o in out])
    missing = [m for o in out for m in o[2]]
    return EigenScan(form.kind, g1, g2, eig4, tr, missing)


# ---------------------------------------------------------------------------
# error norms


def _as_points(values, n, width):
    """Coerce an exact-field return value to shape (n, width).

    Component-first stacks ``(width, n)`` are transposed; this wins when
    ``n == width``.
    """
    a = np.asarray(values, dtype=float)
    if width == 1:
        return np.broadcast_to(a.reshape(-1) if a.ndim else a, (n,)).astype(float)
    if a.ndim == 2 and a.shape[0] == width and a.shape[1] == n:
        a = a.T
    return np.broadcast_to(a, (n, width)).astype(float)


@dataclass
class ErrorRow:
    mesh_id: str
    h: float
    n_dofs: int
    l2_disp: float
    energy: float
    l2_hydro: float

    def as_tuple(self):
        return (self.mesh_id, self.h, self.n_dofs, self.l2_disp, self.energy, self.l2_hydro)


ERROR_COLUMNS = ("mesh_id", "h", "n_dofs", "l2_disp", "energy", "l2_hydro")


def error_norms(sol: FieldSolution, u_exact: Callable, sigma_exact: Callable,
                p_exact: Optional[Callable] = None, hydro_mode: str = "pointwise",
                degree: int = 8, mesh_id: str = "") -> ErrorRow:
    """Displacement L2 error, energy error and hydrostatic-stress L2 error.

    Exact fields take ``(x, y)`` arrays.  ``u_exact`` returns two components
    and ``sigma_exact`` the Voigt triple (either stacked first or last).  When
    ``p_exact`` is omitted it is derived from ``sigma_exact``.

    ``hydro_mode="element_average"`` replaces the discrete hydrostatic stress
    by its element mean before differencing.
    """
    if hydro_mode not in ("pointwise", "element_average"):
        raise ValueError(f"unknown hydro_mode {hydro_mode!r}")
    mesh, law = sol.mesh, sol.law
    kind = sol.formulation.basis
    e_u = e_a = e_p = 0.0
    for e in range(mesh.n_elements):
        xy = mesh.coords(e)
        op = sol.element_ops[e]
        geom = op.geom
        rule = polygon_rule(xy, degree, geom.centroid)
        x, y = rule.points[:, 0], rule.points[:, 1]
        n = len(x)
        w = rule.weights
        xi, eta = bases.scaled_coords(rule.points, geom.centroid, geom.diameter)
        M = bases.monomials(xi, eta)
        d = sol.d[element_dof_indices(mesh.elements[e])]
        uh = M @ (op.PiEps @ d)
        du = _as_points(u_exact(x, y), n, 2) - uh
        e_u += float(w @ np.sum(du * du, axis=1))

        P, _ = bases.stress_basis(kind, xi, eta, geom.diameter)
        sh = P @ sol.beta[e]
        ds = _as_points(sigma_exact(x, y), n, 3) - sh
        e_a += float(w @ np.einsum("ni,ij,nj->n", ds, law.Cinv, ds))

        ph = hydrostatic_from_voigt(sh, law)
        if hydro_mode == "element_average":
            ph = np.full(n, (w @ ph) / w.sum())
        if p_exact is None:
            pe = hydrostatic_from_voigt(_as_points(sigma_exact(x, y), n, 3), law)
        else:
            pe = _as_points(p_exact(x, y), n, 1)
        e_p += float(w @ (pe - ph) ** 2)
    return ErrorRow(mesh_id, mesh.h_max(), 2 * mesh.n_nodes,
                    np.sqrt(e_u), np.sqrt(e_a), np.sqrt(e_p))


@dataclass
class RateFit:
    rates: dict
    used_levels: int
    warning: Optional[str] = None


def fit_rate(rows: Sequence[ErrorRow], norms=("l2_disp", "energy", "l2_hydro"),
             drop_coarsest: Optional[bool] = None) -> RateFit:
    """Least-squares slope of log(error) against log(h) for each norm.

    With four or more levels the coarsest is dropped unless
    ``drop_coarsest`` says otherwise.  Non-monotone data still yields slopes
    but sets ``warning``.
    """
    if len(rows) < 3:
        raise ValueError("rate fitting needs at least 3 mesh levels")
    rows = sorted(rows, key=lambda r: -r.h)
    if drop_coarsest is None:
        drop_coarsest = len(rows) >= 4
    if drop_coarsest:
        rows = rows[1:]
    h = np.log(np.array([r.h for r in rows]))
    rates, notes = {}, []
    for name in norms:
        err = np.array([getattr(r, name) for r in rows], dtype=float)
        if np.any(err <= 0) or not np.all(np.isfinite(err)):
            rates[name] = float("nan")
            notes.append(f"{name}: non-positive error")
            continue
        slope = np.polyfit(h, np.log(err), 1)[0]
        rates[name] = float(slope)
        if np.any(np.diff(err) > 0):
            notes.append(f"{name}: errors not monotone under refinement")
    warn = "; ".join(notes) or None
    if warn:
        warnings.warn(warn, RuntimeWarning, stacklevel=2)
    return RateFit(rates, len(rows), warn)


def fit_slope(h, err) -> float:
    """Plain least-squares slope in log-log coordinates."""
    return float(np.polyfit(np.log(np.asarray(h, float)), np.log(np.asarray(err, float)), 1)[0])


# ---------------------------------------------------------------------------
# field recovery


@dataclass
class RecoveredFields:
    points: np.ndarray     # (ne, ns, 2)
    sigma: np.ndarray      # (ne, ns, 3)
    pressure: np.ndarray   # (ne, ns)
    strain: np.ndarray     # (ne, ns, 3), Voigt with engineering shear
    trace: np.ndarray      # (ne, ns) in-plane strain trace

    def cell_mean(self, name: str) -> np.ndarray:
        return getattr(self, name).mean(axis=1)


def recover_fields(sol: FieldSolution, sample: str = "nodes") -> RecoveredFields:
    """Sample the projected stress ``P beta`` and derived quantities.

    ``sample`` is ``"nodes"`` (the six element nodes), ``"centroid"`` or
    ``"nodes+centroid"``.
    """
    mesh, law = sol.mesh, sol.law
    kind = sol.formulation.basis
    pts_all, sig_all = [], []
    for e in range(mesh.n_elements):
        geom = sol.element_ops[e].geom
        xy = mesh.coords(e)
        if sample == "nodes":
            pts = xy
        elif sample == "centroid":
            pts = geom.centroid[None, :]
        elif sample == "nodes+centroid":
            pts = np.vstack([xy, geom.centroid])
        else:
            raise ValueError(f"unknown sample spec {sample!r}")
        xi, eta = bases.scaled_coords(pts, geom.centroid, geom.diameter)
        P, _ = bases.stress_basis(kind, xi, eta, geom.diameter)
        pts_all.append(pts)
        sig_all.append(P @ sol.beta[e])
    points = np.array(pts_all)
    sigma = np.array(sig_all)
    strain = sigma @ law.Cinv.T
    return RecoveredFields(points, sigma, hydrostatic_from_voigt(sigma, law), strain,
                           strain[..., 0] + strain[..., 1])


def element_mean_hydrostatic(sol: FieldSolution, degree: int = 4) -> np.ndarray:
    """Area average of the hydrostatic stress of ``P beta`` on each element."""
    mesh, law = sol.mesh, sol.law
    kind = sol.formulation.basis
    out = np.empty(mesh.n_elements)
    for e in range(mesh.n_elements):
        geom = sol.element_ops[e].geom
        rule = polygon_rule(mesh.coords(e), degree, geom.centroid)
        xi, eta = bases.scaled_coords(rule.points, geom.centroid, geom.diameter)
        P, _ = bases.stress_basis(kind, xi, eta, geom.diameter)
        p = hydrostatic_from_voigt(P @ sol.beta[e], law)
        out[e] = rule.weights @ p / rule.weights.sum()
    return out


def inject_exact(mesh: Mesh, formulation, law: MaterialLaw, u_exact: Callable,
                 sigma_exact: Optional[Callable] = None, degree: int = 8) -> FieldSolution:
    """Build a solution from an exact field without solving.

    Nodal displacements are sampled from ``u_exact``.  Stress coefficients
    come from the element projection of those displacements, or, when
    ``sigma_exact`` is given, from the compliance-weighted L2 projection of
    the exact stress onto the stress basis.
    """
    form = as_formulation(formulation)
    x, y = mesh.nodes[:, 0], mesh.nodes[:, 1]
    d = _as_points(u_exact(x, y), mesh.n_nodes, 2).ravel()
    ops, beta = [], []
    for e in range(mesh.n_elements):
        xy = mesh.coords(e)
        op = element_operators(xy, law, form, geom=mesh.geometry(e))
        ops.append(op)
        if sigma_exact is None:
            beta.append(op.stress_coefficients(d[element_dof_indices(mesh.elements[e])]))
        else:
            rule = polygon_rule(xy, degree, op.geom.centroid)
            xi, eta = bases.scaled_coords(rule.points, op.geom.centroid, op.geom.diameter)
            P, _ = bases.stress_basis(form.basis, xi, eta, op.geom.diameter)
            s = _as_points(sigma_exact(rule.points[:, 0], rule.points[:, 1]), len(xi), 3)
            rhs = np.einsum("n,nik,ij,nj->k", rule.weights, P, law.Cinv, s)
            beta.append(np.linalg.solve(op.H, rhs))
    return FieldSolution(mesh, form, law, d, beta, ops)


# ---------------------------------------------------------------------------
# CSV output


def _fmt(v):
    if isinstance(v, float):
        return repr(v) if np.isfinite(v) else "nan"
    return str(v)


def write_error_csv(rows: Sequence[ErrorRow], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(ERROR_COLUMNS)
        for r in rows:
            w.writerow([_fmt(v) for v in r.as_tuple()])


def write_scan_csv(scan: EigenScan, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(("g1", "g2", "eig4"))
        for row in scan.rows():
            w.writerow([_fmt(v) for v in row])
