"""Stress-hybrid and penalty stress-hybrid virtual elements on six-noded polygons."""

from .material import MaterialLaw, hydrostatic_from_voigt, make_material
from .mesh import (ElementGeometry, Mesh, MeshError, element_geometry, gen_degenerate_strip,
                   gen_nonconvex_strip, gen_triangle6_perturbed, gen_triangle6_structured,
                   mesh_io_read, mesh_io_write, six_noded_triangle)
from .element import FORMULATIONS, STABLE_KINDS, ElementOperators, Formulation, element_operators
from .system import Dirichlet, FieldSolution, Loads, SolveError, apply_dirichlet, assemble, solve, solve_problem

__all__ = [
    "MaterialLaw", "make_material", "hydrostatic_from_voigt",
    "Mesh", "MeshError", "ElementGeometry", "element_geometry", "six_noded_triangle",
    "gen_triangle6_structured", "gen_triangle6_perturbed", "gen_degenerate_strip",
    "gen_nonconvex_strip", "mesh_io_read", "mesh_io_write",
    "FORMULATIONS", "STABLE_KINDS", "Formulation", "ElementOperators", "element_operators",
    "Dirichlet", "Loads", "FieldSolution", "SolveError",
    "assemble", "apply_dirichlet", "solve", "solve_problem",
]
__version__ = "0.1.0"
