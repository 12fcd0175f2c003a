"""Global assembly, Dirichlet elimination and the sparse direct solve."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional, Sequence

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .element import ElementOperators, Formulation, as_formulation, element_operators
from .material import MaterialLaw
from .mesh import Mesh


class SolveError(RuntimeError):
    pass


@dataclass
class Dirichlet:
    """Prescribed displacement on the nodes of tagged boundary edges.

    ``value(x, y)`` returns ``(ux, uy)`` arrays; only the listed components
    are constrained.  ``value=None`` prescribes zero.
    """
    tag: str
    components: tuple = (0, 1)
    value: Optional[Callable] = None


@dataclass
class Loads:
    body_force: Optional[Callable] = None
    tractions: Mapping[str, Callable] = field(default_factory=dict)
    dirichlet: Sequence[Dirichlet] = ()
    # extra constraints as {node: (ux or None, uy or None)}
    point_constraints: Mapping[int, tuple] = field(default_factory=dict)


@dataclass
class GlobalSystem:
    mesh: Mesh
    formulation: Formulation
    law: MaterialLaw
    K: sp.csr_matrix
    f: np.ndarray
    element_ops: list
    dirichlet: tuple = (np.zeros(0, dtype=np.int64), np.zeros(0))


@dataclass
class ReducedSystem:
    K: sp.csr_matrix
    f: np.ndarray
    free: np.ndarray
    fixed: np.ndarray
    values: np.ndarray
    parent: GlobalSystem


@dataclass
class FieldSolution:
    mesh: Mesh
    formulation: Formulation
    law: MaterialLaw
    d: np.ndarray
    beta: list
    element_ops: list
    reactions: np.ndarray = None
    fixed: np.ndarray = None
    residual: float = 0.0           # normwise backward error of the reduced solve
    relative_residual: float = 0.0  # ||K d - f|| / ||f|| on the free DOFs

    def displacement(self) -> np.ndarray:
        return self.d.reshape(-1, 2)

    def element_dofs(self, e: int) -> np.ndarray:
        return element_dof_indices(self.mesh.elements[e])


def element_dof_indices(conn) -> np.ndarray:
    conn = np.asarray(conn, dtype=np.int64)
    return np.column_stack([2 * conn, 2 * conn + 1]).ravel()


def _tag_edges(mesh: Mesh):
    out = {}
    for e, k, tag in mesh.boundary:
        out.setdefault(e, {}).setdefault(tag, []).append(k)
    return out


def assemble(mesh: Mesh, formulation, law: MaterialLaw,
             loads: Optional[Loads] = None) -> GlobalSystem:
    """Scatter-add element stiffness matrices and force vectors."""
    form = as_formulation(formulation)
    loads = loads or Loads()
    if mesh.elements.shape[1] != 6:
        raise SolveError("inconsistent element arity")
    tagged = _tag_edges(mesh)
    for tag in loads.tractions:
        if not any(t == tag for _, _, t in mesh.boundary):
            raise SolveError(f"traction given for unknown boundary tag {tag!r}")
    ndof = 2 * mesh.n_nodes
    rows, cols, vals = [], [], []
    f = np.zeros(ndof)
    ops = []
    for e in range(mesh.n_elements):
        xy = mesh.coords(e)
        edges = tagged.get(e, {})
        tr_edges = []
        fns = []
        for tag, fn in loads.tractions.items():
            if tag in edges:
                tr_edges.append(edges[tag])
                fns.append(fn)
        op = element_operators(xy, law, form, loads.body_force, geom=mesh.geometry(e))
        fe = op.f.copy()
        if tr_edges:
            from .element import traction_vector
            from .quadrature import edge_rule
            er = edge_rule(xy, 5)
            for ks, fn in zip(tr_edges, fns):
                fe += traction_vector(xy, er, ks, fn)
        dofs = element_dof_indices(mesh.elements[e])
        rows.append(np.repeat(dofs, 12))
        cols.append(np.tile(dofs, 12))
        vals.append(op.K.ravel())
        np.add.at(f, dofs, fe)
        ops.append(op)
    K = sp.coo_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                      shape=(ndof, ndof)).tocsr()
    K = 0.5 * (K + K.T)
    system = GlobalSystem(mesh, form, law, K.tocsr(), f, ops)
    system.dirichlet = dirichlet_dofs(mesh, loads)
    return system


def dirichlet_dofs(mesh: Mesh, loads: Loads):
    """Collect ``(dofs, values)`` of all prescribed displacements."""
    fixed = {}
    for bc in loads.dirichlet:
        nodes = mesh.nodes_with_tag(bc.tag)
        if len(nodes) == 0:
            continue
        xy = mesh.nodes[nodes]
        if bc.value is None:
            vals = np.zeros((len(nodes), 2))
        else:
            vals = np.asarray(bc.value(xy[:, 0], xy[:, 1]), dtype=float)
            vals = np.broadcast_to(vals.T if vals.shape[0] == 2 and vals.ndim == 2 else vals,
                                   (len(nodes), 2))
        for c in bc.components:
            for n, v in zip(nodes, vals[:, c]):
                fixed[2 * int(n) + c] = float(v)
    for n, pair in loads.point_constraints.items():
        for c, v in enumerate(pair):
            if v is not None:
                fixed[2 * int(n) + c] = float(v)
    dofs = np.array(sorted(fixed), dtype=np.int64)
    return dofs, np.array([fixed[i] for i in dofs], dtype=float)


def apply_dirichlet(system: GlobalSystem, dirichlet=None) -> ReducedSystem:
    """Eliminate prescribed DOFs, moving their contribution to the right side."""
    dofs, values = system.dirichlet if dirichlet is None else dirichlet
    dofs = np.asarray(dofs, dtype=np.int64)
    values = np.asarray(values, dtype=float)
    ndof = system.K.shape[0]
    if len(dofs) == 0:
        raise SolveError("under-constrained system: no displacement constraints")
    mask = np.ones(ndof, dtype=bool)
    mask[dofs] = False
    free = np.nonzero(mask)[0]
    Kff = system.K[free][:, free].tocsc()
    Kfc = system.K[free][:, dofs]
    rhs = system.f[free] - Kfc @ values
    return ReducedSystem(Kff, rhs, free, dofs, values, system)


def condition_estimate(A, lu=None) -> float:
    """1-norm condition number estimate from an existing sparse LU."""
    lu = spla.splu(A.tocsc()) if lu is None else lu
    n = A.shape[0]
    inv = spla.LinearOperator((n, n), matvec=lu.solve,
                              rmatvec=lambda v: lu.solve(v, trans="T"), dtype=float)
    try:
        return float(spla.onenormest(inv) * spla.norm(A, 1))
    except (ValueError, RuntimeError):
        return float("inf")


def solve(reduced: ReducedSystem) -> FieldSolution:
    """Direct sparse solve and per-element stress coefficient recovery."""
    system = reduced.parent
    ndof = system.K.shape[0]
    d = np.zeros(ndof)
    d[reduced.fixed] = reduced.values
    res = rel = 0.0
    if len(reduced.free):
        A = reduced.K.tocsc()
        with warnings.catch_warnings():
            warnings.simplefilter("error", spla.MatrixRankWarning)
            try:
                lu = spla.splu(A)
                x = lu.solve(reduced.f)
            except (RuntimeError, spla.MatrixRankWarning) as exc:
                raise SolveError("under-constrained system: factorization breakdown") from exc
        if not np.all(np.isfinite(x)):
            raise SolveError("under-constrained system: non-finite solution")
        # one step of iterative refinement
        x = x - lu.solve(A @ x - reduced.f)
        cond = condition_estimate(A, lu)
        if not np.isfinite(cond) or cond > 1e15:
            raise SolveError(f"under-constrained system: condition estimate {cond:.1e}")
        r = A @ x - reduced.f
        fn = np.linalg.norm(reduced.f)
        res = float(np.linalg.norm(r) / (spla.norm(A) * np.linalg.norm(x) + fn + 1e-300))
        rel = float(np.linalg.norm(r) / fn) if fn > 0 else float(np.linalg.norm(r))
        if res > 1e-10:
            raise SolveError(f"solve failed: backward error {res:.2e}")
        d[reduced.free] = x
    reactions = system.K @ d - system.f
    beta = [op.stress_coefficients(d[element_dof_indices(conn)])
            for op, conn in zip(system.element_ops, system.mesh.elements)]
    return FieldSolution(system.mesh, system.formulation, system.law, d, beta,
                         system.element_ops, reactions[reduced.fixed], reduced.fixed, res, rel)


def solve_problem(mesh: Mesh, formulation, law: MaterialLaw, loads: Loads) -> FieldSolution:
    system = assemble(mesh, formulation, law, loads)
    return solve(apply_dirichlet(system))
