"""Cook's membrane with a nearly incompressible material.

Solves on a few structured meshes, prints the tip displacement sequence and
writes one VTK file per formulation on the finest mesh (open in ParaView and
colour by ``hydrostatic_stress`` to see a smooth pressure field).

    python demos/cooks_membrane.py [output_dir]
"""

import os
import sys

from shvem import solve_problem
from shvem.benchmarks import get_case
from shvem.vtk import write_vtk

out = sys.argv[1] if len(sys.argv) > 1 else "cook_vtk"
os.makedirs(out, exist_ok=True)
case = get_case("cooks_membrane")
levels = (4, 8, 16, 32)

for kind in ("sh15", "psh12", "sh9_stab", "sh11_stab"):
    tips = []
    for n in levels:
        sol = solve_problem(case.mesh(n), kind, case.law, case.loads)
        tips.append(case.quantities(sol)["tip_uy"])
    path = os.path.join(out, f"cook_{kind}_{levels[-1]}.vtk")
    write_vtk(path, sol, f"Cook membrane {kind}")
    print(f"{kind:10s} tip u_y: " + "  ".join(f"{t:.4f}" for t in tips) + f"   -> {path}")
