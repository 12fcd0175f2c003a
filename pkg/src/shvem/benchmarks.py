"""Benchmark problems with closed-form solutions where they exist.

Every exact field takes coordinate arrays ``(x, y)`` and returns a
component-first stack: ``(2, n)`` for displacement, ``(3, n)`` for Voigt
stress and ``(n,)`` for hydrostatic stress.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .material import MaterialLaw, hydrostatic_from_voigt, make_material
from .mesh import (Mesh, MeshError, gen_degenerate_strip, gen_mapped, gen_nonconvex_strip,
                   gen_triangle6_perturbed, gen_triangle6_structured, rect_predicates)
from .system import Dirichlet, FieldSolution, Loads


@dataclass
class ExactSolution:
    u: Callable
    sigma: Callable
    p: Optional[Callable] = None


@dataclass
class BenchmarkCase:
    """A boundary value problem plus how to mesh it and what to measure.

    ``make_mesh(n, family)`` returns the mesh of refinement parameter ``n``
    for the named family.  ``qoi(sol)`` returns a dict of scalar quantities.
    """
    name: str
    law: MaterialLaw
    make_mesh: Callable
    loads: Loads
    exact: Optional[ExactSolution] = None
    qoi: Optional[Callable] = None
    hydro_mode: str = "pointwise"
    families: tuple = ("structured",)
    levels: tuple = (4, 8, 16, 32)
    params: dict = field(default_factory=dict)
    # exact outward normals of curved boundaries, tag -> fn(x, y) -> (nx, ny)
    curved_normals: dict = field(default_factory=dict)
    # per-formulation exceptions to ``hydro_mode``
    hydro_overrides: dict = field(default_factory=dict)

    def hydro_mode_for(self, kind: str) -> str:
        return self.hydro_overrides.get(kind, self.hydro_mode)

    def mesh(self, n: int, family: Optional[str] = None) -> Mesh:
        family = family or self.families[0]
        if family not in self.families:
            raise MeshError(f"case {self.name!r} has no mesh family {family!r}")
        return self.make_mesh(n, family)

    def quantities(self, sol: FieldSolution) -> dict:
        return {} if self.qoi is None else dict(self.qoi(sol))


def _node_near(mesh: Mesh, x, y) -> int:
    return int(np.argmin(np.hypot(mesh.nodes[:, 0] - x, mesh.nodes[:, 1] - y)))


def _exact_dirichlet(u):
    return lambda x, y: np.asarray(u(x, y)).T


# ---------------------------------------------------------------------------
# cantilever with an end shear load


def timoshenko_beam(E_Y, nu, length, depth, load, regime="plane_strain"):
    """End-loaded cantilever occupying [0, L] x [-D/2, D/2].

    The resultant ``load`` acts in y on the right end; the left end fixity is
    ``u = v = du/dy = 0`` at the origin.  Plane strain uses the effective
    constants ``E/(1-nu^2)`` and ``nu/(1-nu)``.
    """
    if regime == "plane_strain":
        E, v = E_Y / (1.0 - nu ** 2), nu / (1.0 - nu)
    else:
        E, v = E_Y, nu
    L, D, P = length, depth, load
    I = D ** 3 / 12.0

    def u(x, y):
        x, y = np.asarray(x, float), np.asarray(y, float)
        ux = -P * y / (6 * E * I) * ((6 * L - 3 * x) * x + (2 + v) * (y ** 2 - D ** 2 / 4))
        uy = P / (6 * E * I) * (3 * v * y ** 2 * (L - x) + (4 + 5 * v) * D ** 2 * x / 4
                                + (3 * L - x) * x ** 2)
        return np.array([ux, uy])

    def sigma(x, y):
        x, y = np.asarray(x, float), np.asarray(y, float)
        sxx = -P * (L - x) * y / I
        sxy = P / (2 * I) * (D ** 2 / 4 - y ** 2)
        return np.array([sxx, np.zeros_like(sxx), sxy])

    return u, sigma


def _traction_from(sigma):
    def t(x, y, nx, ny):
        s = sigma(x, y)
        return np.array([s[0] * nx + s[2] * ny, s[2] * nx + s[1] * ny])
    return t


def _beam_case(name, E_Y, nu, L, D, P, regime, families, levels, strip_rows=1):
    law = make_material(E_Y, nu, regime)
    u, sigma = timoshenko_beam(E_Y, nu, L, D, P, regime)
    preds = rect_predicates(0.0, L, -D / 2, D / 2)
    v_tip = float(u(L, D / 2)[1])

    def make_mesh(n, family):
        dom = ((0.0, L), (-D / 2, D / 2))
        if family == "square_grid":          # n x n cells, as in the thick-beam table
            return gen_triangle6_structured(n, n, dom, "diagonal", "up")
        if family == "structured":           # n x rows cells of right triangles
            return gen_triangle6_structured(n, strip_rows, dom, "diagonal", "up")
        if family == "cross":
            return gen_triangle6_structured(n, strip_rows, dom, "cross")
        if family == "degenerate":
            m = gen_degenerate_strip(n, strip_rows, L, D, 0.9)
        elif family == "nonconvex":
            m = gen_nonconvex_strip(n, strip_rows, L, D, 0.3)
        else:
            raise MeshError(f"unknown beam mesh family {family!r}")
        # strip generators work on [0, L] x [0, D]; shift to the beam axis
        nodes = m.nodes - np.array([0.0, D / 2])
        from .mesh import tag_boundary
        return Mesh(nodes, m.elements, tag_boundary(nodes, m.elements, preds))

    loads = Loads(tractions={"right": _traction_from(sigma)},
                  dirichlet=[Dirichlet("left", (0, 1), _exact_dirichlet(u))])

    def qoi(sol):
        i = _node_near(sol.mesh, L, D / 2)
        return {"tip_uy": float(sol.d[2 * i + 1]),
                "tip_normalized": float(sol.d[2 * i + 1] / v_tip)}

    return BenchmarkCase(name, law, make_mesh, loads,
                         ExactSolution(u, sigma), qoi, "pointwise", families, levels,
                         dict(E_Y=E_Y, nu=nu, L=L, D=D, P=P, tip_exact=v_tip))


def case_cantilever_thin() -> BenchmarkCase:
    """Thin plane-strain cantilever, L=32, D=1, P=-100, nu=0.49995."""
    return _beam_case("cantilever_thin", 1.0e5, 0.49995, 32.0, 1.0, -100.0, "plane_strain",
                      ("structured", "cross", "degenerate", "nonconvex", "square_grid"),
                      (8, 16, 32, 64))


def case_cantilever_thick() -> BenchmarkCase:
    """Thick plane-stress cantilever, L=48, D=12, P=40, nu=0.25.

    The reference family is an n x n grid of 4:1 cells split along the
    lower-left to upper-right diagonal; the tip is the top-right corner.
    """
    return _beam_case("cantilever_thick", 30000.0, 0.25, 48.0, 12.0, 40.0, "plane_stress",
                      ("square_grid", "structured", "cross"), (1, 2, 4, 8, 16))


# ---------------------------------------------------------------------------
# Cook's membrane


COOK_CORNERS = np.array([[0.0, 0.0], [48.0, 44.0], [48.0, 60.0], [0.0, 44.0]])


def _bilinear_map(corners):
    p00, p10, p11, p01 = corners
    def mapping(s, t):
        x = (1 - s) * (1 - t) * p00 + s * (1 - t) * p10 + s * t * p11 + (1 - s) * t * p01
        return float(x[0]), float(x[1])
    return mapping


def case_cooks_membrane() -> BenchmarkCase:
    law = make_material(250.0, 0.49995)
    F = 6.25
    mapping = _bilinear_map(COOK_CORNERS)
    tol = 1e-8
    preds = {
        "left": lambda x, y: abs(x) < tol,
        "right": lambda x, y: abs(x - 48.0) < tol,
    }

    def make_mesh(n, family):
        if family == "structured":
            return gen_mapped(n, n, mapping, preds, "diagonal", "up")
        if family == "cross":
            return gen_mapped(n, n, mapping, preds, "cross")
        if family == "perturbed":
            return gen_triangle6_perturbed(gen_mapped(n, n, mapping, preds, "cross"), 0.2, seed=n)
        raise MeshError(f"unknown Cook mesh family {family!r}")

    loads = Loads(tractions={"right": lambda x, y, nx, ny: np.array([0.0, F])},
                  dirichlet=[Dirichlet("left")])

    def qoi(sol):
        i = _node_near(sol.mesh, 48.0, 60.0)
        return {"tip_uy": float(sol.d[2 * i + 1])}

    return BenchmarkCase("cooks_membrane", law, make_mesh, loads, None, qoi, "pointwise",
                         ("structured", "cross", "perturbed"), (2, 4, 8, 16, 32), dict(F=F))


# ---------------------------------------------------------------------------
# infinite plate with a circular hole


def kirsch(a, sigma0, law: MaterialLaw):
    """Plane-strain field around a traction-free hole under x-tension."""
    mu = law.mu
    kappa = 3.0 - 4.0 * law.nu

    def polar(x, y):
        x, y = np.asarray(x, float), np.asarray(y, float)
        return np.hypot(x, y), np.arctan2(y, x)

    def u(x, y):
        r, th = polar(x, y)
        c = a * sigma0 / (8.0 * mu)
        ux = c * (r / a * (kappa + 1) * np.cos(th)
                  + 2 * a / r * ((1 + kappa) * np.cos(th) + np.cos(3 * th))
                  - 2 * a ** 3 / r ** 3 * np.cos(3 * th))
        uy = c * (r / a * (kappa - 3) * np.sin(th)
                  + 2 * a / r * ((1 - kappa) * np.sin(th) + np.sin(3 * th))
                  - 2 * a ** 3 / r ** 3 * np.sin(3 * th))
        return np.array([ux, uy])

    def sigma(x, y):
        r, th = polar(x, y)
        q2, q4 = a ** 2 / r ** 2, a ** 4 / r ** 4
        c2, c4, s2, s4 = np.cos(2 * th), np.cos(4 * th), np.sin(2 * th), np.sin(4 * th)
        sxx = sigma0 * (1 - q2 * (1.5 * c2 + c4) + 1.5 * q4 * c4)
        syy = sigma0 * (-q2 * (0.5 * c2 - c4) - 1.5 * q4 * c4)
        sxy = sigma0 * (-q2 * (0.5 * s2 + s4) + 1.5 * q4 * s4)
        return np.array([sxx, syy, sxy])

    return u, sigma


def _unit_circle(s):
    """``(cos, sin)`` of the angle ``s*pi/2`` with exact values at 0, 1/2, 1."""
    exact = {0.0: (1.0, 0.0), 1.0: (0.0, 1.0)}
    if s in exact:
        return exact[s]
    th = 0.5 * np.pi * s
    return np.cos(th), np.sin(th)


def quarter_plate_map(a, L):
    """Unit square onto the quarter plate [0,L]^2 minus the disc r < a.

    ``t`` runs from the hole to the outer edges, ``s`` sweeps the angle.
    """
    def mapping(t, s):
        c, sn = _unit_circle(s)
        inner = np.array([a * c, a * sn])
        if s == 0.5:
            outer = np.array([L, L])
        elif s < 0.5:
            outer = np.array([L, L * sn / c])
        else:
            outer = np.array([L * c / sn, L])
        p = (1 - t) * inner + t * outer
        return float(p[0]), float(p[1])
    return mapping


def case_plate_with_hole() -> BenchmarkCase:
    a, L, s0 = 1.0, 5.0, 1.0
    law = make_material(2.0e7, 0.49995)
    u, sigma = kirsch(a, s0, law)
    mapping = quarter_plate_map(a, L)
    tol = 1e-8
    preds = {
        "left": lambda x, y: abs(x) < tol,
        "bottom": lambda x, y: abs(y) < tol,
        "right": lambda x, y: abs(x - L) < tol,
        "top": lambda x, y: abs(y - L) < tol,
        "hole": lambda x, y: np.hypot(x, y) < a + 0.5 * (L - a),
    }

    def make_mesh(n, family):
        if family == "structured":
            return gen_mapped(n, 2 * n, mapping, preds, "diagonal", "up")
        if family == "cross":
            return gen_mapped(n, 2 * n, mapping, preds, "cross")
        if family == "perturbed":
            return gen_triangle6_perturbed(gen_mapped(n, 2 * n, mapping, preds, "cross"),
                                           0.2, seed=n)
        raise MeshError(f"unknown plate mesh family {family!r}")

    t = _traction_from(sigma)
    loads = Loads(tractions={"right": t, "top": t},
                  dirichlet=[Dirichlet("left", (0,)), Dirichlet("bottom", (1,))])
    return BenchmarkCase("plate_with_hole", law, make_mesh, loads, ExactSolution(u, sigma),
                         None, "pointwise", ("structured", "cross", "perturbed"),
                         (8, 16, 32, 64), dict(a=a, L=L, sigma0=s0))


# ---------------------------------------------------------------------------
# thick cylinder under internal pressure


def lame_cylinder(a, b, p, law: MaterialLaw):
    """Plane-strain thick cylinder with internal pressure ``p``."""
    k = p * a ** 2 / (b ** 2 - a ** 2)
    E, nu = law.E_Y, law.nu

    def u(x, y):
        x, y = np.asarray(x, float), np.asarray(y, float)
        r = np.hypot(x, y)
        ur = (1 + nu) / E * k * ((1 - 2 * nu) * r + b ** 2 / r)
        return np.array([ur * x / r, ur * y / r])

    def sigma(x, y):
        x, y = np.asarray(x, float), np.asarray(y, float)
        r2 = x ** 2 + y ** 2
        srr = k * (1 - b ** 2 / r2)
        stt = k * (1 + b ** 2 / r2)
        c2, s2 = x ** 2 / r2, y ** 2 / r2
        cs = x * y / r2
        return np.array([srr * c2 + stt * s2, srr * s2 + stt * c2, (srr - stt) * cs])

    p_const = (1 + nu) * 2 * k / 3.0 if law.regime == "plane_strain" else 2 * k / 3.0

    def hydro(x, y):
        return np.full(np.shape(np.asarray(x, float)), p_const)

    return u, sigma, hydro


def annulus_map(a, b):
    """Quarter annulus: ``t`` is radial, ``s`` sweeps the quarter angle."""
    def mapping(t, s):
        c, sn = _unit_circle(s)
        r = a + (b - a) * t
        return float(r * c), float(r * sn)
    return mapping


def case_pressurized_cylinder() -> BenchmarkCase:
    a, b, p = 1.0, 5.0, 1.0e5
    law = make_material(2.0e5, 0.49995)
    u, sigma, hydro = lame_cylinder(a, b, p, law)
    mapping = annulus_map(a, b)
    tol = 1e-8
    mid = 0.5 * (a + b)
    preds = {
        "left": lambda x, y: abs(x) < tol,
        "bottom": lambda x, y: abs(y) < tol,
        "inner": lambda x, y: np.hypot(x, y) < mid,
        "outer": lambda x, y: np.hypot(x, y) >= mid,
    }

    def make_mesh(n, family):
        if family == "structured":
            return gen_mapped(n, n, mapping, preds, "diagonal", "up")
        if family == "cross":
            return gen_mapped(n, n, mapping, preds, "cross")
        if family == "perturbed":
            return gen_triangle6_perturbed(gen_mapped(n, n, mapping, preds, "cross"), 0.2, seed=n)
        raise MeshError(f"unknown cylinder mesh family {family!r}")

    loads = Loads(tractions={"inner": lambda x, y, nx, ny: -p * np.array([nx, ny])},
                  dirichlet=[Dirichlet("left", (0,)), Dirichlet("bottom", (1,))])
    radial = lambda x, y: np.array([x, y]) / np.hypot(x, y)
    return BenchmarkCase("pressurized_cylinder", law, make_mesh, loads,
                         ExactSolution(u, sigma, hydro), None, "element_average",
                         ("structured", "cross", "perturbed"), (4, 8, 16, 32),
                         dict(a=a, b=b, p=p, hydrostatic=float(hydro(1.0, 0.0))),
                         {"inner": lambda x, y: -radial(x, y), "outer": radial},
                         # averaging is a remedy for the pure stress-hybrid kinds only
                         {"psh12": "pointwise"})


# ---------------------------------------------------------------------------
# manufactured solution on the unit square


def manufactured_fields(law: MaterialLaw):
    lam, mu = law.lam, law.mu
    pi = np.pi
    c = 1.0 / (1.0 + lam)

    def u(x, y):
        x, y = np.asarray(x, float), np.asarray(y, float)
        s = c * np.sin(pi * x) * np.sin(pi * y)
        return np.array([np.sin(2 * pi * y) * (np.cos(2 * pi * x) - 1) + s,
                         np.sin(2 * pi * x) * (1 - np.cos(2 * pi * y)) + s])

    def grad(x, y):
        x, y = np.asarray(x, float), np.asarray(y, float)
        sx, cx = np.sin(pi * x), np.cos(pi * x)
        sy, cy = np.sin(pi * y), np.cos(pi * y)
        ux = -2 * pi * np.sin(2 * pi * y) * np.sin(2 * pi * x) + c * pi * cx * sy
        uy = 2 * pi * np.cos(2 * pi * y) * (np.cos(2 * pi * x) - 1) + c * pi * sx * cy
        vx = 2 * pi * np.cos(2 * pi * x) * (1 - np.cos(2 * pi * y)) + c * pi * cx * sy
        vy = 2 * pi * np.sin(2 * pi * x) * np.sin(2 * pi * y) + c * pi * sx * cy
        return ux, uy, vx, vy

    def sigma(x, y):
        ux, uy, vx, vy = grad(x, y)
        eps = np.array([ux, vy, uy + vx])
        return np.einsum("ij,j...->i...", law.C, eps)

    def body(x, y):
        x, y = np.asarray(x, float), np.asarray(y, float)
        k = (lam + mu) / (lam + 1)
        cxy = np.cos(pi * (x + y))
        sxsy = np.sin(pi * x) * np.sin(pi * y)
        bx = k * cxy - mu * (8 * np.cos(2 * pi * x) * np.sin(2 * pi * y)
                             - 4 * np.sin(2 * pi * y) + 2 * c * sxsy)
        by = k * cxy - mu * (-8 * np.cos(2 * pi * y) * np.sin(2 * pi * x)
                             + 4 * np.sin(2 * pi * x) + 2 * c * sxsy)
        return -pi ** 2 * np.array([bx, by])

    return u, sigma, body


def case_manufactured() -> BenchmarkCase:
    law = make_material(1.0, 0.49995)
    u, sigma, body = manufactured_fields(law)

    def make_mesh(n, family):
        if family == "structured":
            return gen_triangle6_structured(n, n, ((0, 1), (0, 1)), "diagonal", "up")
        if family == "cross":
            return gen_triangle6_structured(n, n, ((0, 1), (0, 1)), "cross")
        if family == "perturbed":
            base = gen_triangle6_structured(n, n, ((0, 1), (0, 1)), "cross")
            return gen_triangle6_perturbed(base, 0.2, seed=n)
        raise MeshError(f"unknown manufactured mesh family {family!r}")

    walls = [Dirichlet(t) for t in ("left", "right", "bottom", "top")]
    loads = Loads(body_force=body, dirichlet=walls)
    return BenchmarkCase("manufactured", law, make_mesh, loads, ExactSolution(u, sigma),
                         None, "pointwise", ("structured", "cross", "perturbed"),
                         (4, 8, 16, 32), dict(body_force=body))


# ---------------------------------------------------------------------------
# punch on a nearly incompressible block


def case_punch() -> BenchmarkCase:
    law = make_material(250.0, 0.4999999)
    F = -250.0
    tol = 1e-9
    preds = {
        "left": lambda x, y: abs(x) < tol,
        "right": lambda x, y: abs(x - 1) < tol,
        "bottom": lambda x, y: abs(y) < tol,
        "top_loaded": lambda x, y: abs(y - 1) < tol and x < 0.5,
        "top_free": lambda x, y: abs(y - 1) < tol and x >= 0.5,
    }

    def make_mesh(n, family):
        if n % 2:
            raise MeshError("punch meshes need an even n so the load ends on a node")
        if family == "structured":
            return gen_triangle6_structured(n, n, ((0, 1), (0, 1)), "diagonal", "up", preds)
        if family == "cross":
            return gen_triangle6_structured(n, n, ((0, 1), (0, 1)), "cross", predicates=preds)
        raise MeshError(f"unknown punch mesh family {family!r}")

    loads = Loads(tractions={"top_loaded": lambda x, y, nx, ny: np.array([0.0, F])},
                  dirichlet=[Dirichlet("left", (0,)), Dirichlet("top_loaded", (0,)),
                             Dirichlet("top_free", (0,)), Dirichlet("bottom", (1,))])

    def qoi(sol):
        from .analysis import recover_fields
        rec = recover_fields(sol, "nodes+centroid")
        return {"max_abs_trace": float(np.abs(rec.trace).max()),
                "max_abs_strain": float(np.abs(rec.strain).max()),
                "min_p": float(rec.pressure.min()), "max_p": float(rec.pressure.max())}

    return BenchmarkCase("punch", law, make_mesh, loads, None, qoi, "pointwise",
                         ("structured", "cross"), (8, 16, 32), dict(F=F))


CASES = {
    "cantilever_thin": case_cantilever_thin,
    "cantilever_thick": case_cantilever_thick,
    "cooks_membrane": case_cooks_membrane,
    "plate_with_hole": case_plate_with_hole,
    "pressurized_cylinder": case_pressurized_cylinder,
    "manufactured": case_manufactured,
    "punch": case_punch,
}


def get_case(name: str) -> BenchmarkCase:
    try:
        return CASES[name]()
    except KeyError:
        raise ValueError(f"unknown case {name!r}; expected one of {sorted(CASES)}") from None


def boundary_consistency(case: BenchmarkCase, n: Optional[int] = None, samples: int = 10):
    """Largest mismatch between imposed boundary data and the exact field.

    Samples up to ``samples`` edge midpoints per tag.  Dirichlet data is
    compared against the exact displacement, tractions against ``sigma n``.
    Returns 0 for cases without an exact solution.
    """
    if case.exact is None:
        return 0.0
    mesh = case.mesh(n or case.levels[0])
    worst = 0.0
    for bc in case.loads.dirichlet:
        edges = mesh.edges_with_tag(bc.tag)[:samples]
        for e, k in edges:
            xy = mesh.coords(e)
            p = 0.5 * (xy[k] + xy[(k + 1) % 6])
            ue = np.asarray(case.exact.u(p[:1], p[1:])).reshape(2)
            given = (np.zeros(2) if bc.value is None
                     else np.asarray(bc.value(p[:1], p[1:])).reshape(2))
            for c in bc.components:
                scale = max(1.0, float(np.abs(ue).max()))
                worst = max(worst, abs(ue[c] - given[c]) / scale)
    for tag, fn in case.loads.tractions.items():
        for e, k in mesh.edges_with_tag(tag)[:samples]:
            xy = mesh.coords(e)
            a, b = xy[k], xy[(k + 1) % 6]
            if tag in case.curved_normals:
                # nodes lie on the curve; use its exact normal there
                p = a
                n_ = np.asarray(case.curved_normals[tag](*a), dtype=float)
            else:
                p = 0.5 * (a + b)
                d = b - a
                n_ = np.array([d[1], -d[0]]) / np.hypot(*d)
            s = np.asarray(case.exact.sigma(p[:1], p[1:])).reshape(3)
            te = np.array([s[0] * n_[0] + s[2] * n_[1], s[2] * n_[0] + s[1] * n_[1]])
            tg = np.asarray(fn(p[:1], p[1:], n_[:1], n_[1:])).reshape(2)
            scale = max(1.0, float(np.abs(s).max()))
            worst = max(worst, float(np.abs(te - tg).max()) / scale)
    return worst
