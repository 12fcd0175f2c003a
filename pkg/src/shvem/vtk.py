"""Legacy ASCII VTK output of a solved field for contour plotting."""

from __future__ import annotations

import numpy as np

from .analysis import element_mean_hydrostatic, recover_fields
from .system import FieldSolution

VTK_POLYGON = 7


def write_vtk(path, sol: FieldSolution, title: str = "shvem solution") -> None:
    """Write an unstructured grid with per-point displacement and per-cell
    fields: hydrostatic stress, strain trace and stress at the centroid, plus
    the element-averaged hydrostatic stress."""
    mesh = sol.mesh
    rec = recover_fields(sol, "centroid")
    u = sol.displacement()
    n, ne = mesh.n_nodes, mesh.n_elements
    lines = ["# vtk DataFile Version 3.0", title[:255], "ASCII", "DATASET UNSTRUCTURED_GRID",
             f"POINTS {n} double"]
    lines += [f"{x:.16g} {y:.16g} 0" for x, y in mesh.nodes]
    lines.append(f"CELLS {ne} {ne * 7}")
    lines += ["6 " + " ".join(str(int(i)) for i in conn) for conn in mesh.elements]
    lines.append(f"CELL_TYPES {ne}")
    lines += [str(VTK_POLYGON)] * ne
    lines += [f"POINT_DATA {n}", "VECTORS displacement double"]
    lines += [f"{a:.16g} {b:.16g} 0" for a, b in u]
    lines.append(f"CELL_DATA {ne}")
    for name, values in (("hydrostatic_stress", rec.pressure[:, 0]),
                         ("hydrostatic_stress_mean", element_mean_hydrostatic(sol)),
                         ("strain_trace", rec.trace[:, 0])):
        lines += [f"SCALARS {name} double 1", "LOOKUP_TABLE default"]
        lines += [f"{v:.16g}" for v in values]
    lines += ["SCALARS stress double 3", "LOOKUP_TABLE default"]
    lines += [" ".join(f"{v:.16g}" for v in s) for s in rec.sigma[:, 0, :]]
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_vtk_scalars(path, name: str) -> np.ndarray:
    """Read back one scalar array written by :func:`write_vtk` (for checks)."""
    with open(path) as fh:
        toks = fh.read().split("\n")
    for i, line in enumerate(toks):
        if line.startswith(f"SCALARS {name} "):
            ncomp = int(line.split()[3])
            out = []
            j = i + 2
            while j < len(toks) and toks[j] and not toks[j][0].isalpha():
                out.append([float(v) for v in toks[j].split()])
                j += 1
            a = np.array(out)
            return a[:, 0] if ncomp == 1 else a
    raise KeyError(name)
