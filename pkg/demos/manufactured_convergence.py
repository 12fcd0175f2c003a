"""Convergence on a manufactured solution with a body force.

Fits the displacement L2, energy and hydrostatic-stress L2 rates on
structured meshes of the unit square.  Expected: about 2, 1 and 1.
"""

import warnings

from shvem import solve_problem
from shvem.analysis import error_norms, fit_rate
from shvem.benchmarks import get_case

case = get_case("manufactured")
levels = (4, 8, 16, 32)

for kind in ("sh15", "psh12", "sh9_stab", "sh11_stab"):
    rows = []
    for n in levels:
        mesh = case.mesh(n)
        sol = solve_problem(mesh, kind, case.law, case.loads)
        rows.append(error_norms(sol, case.exact.u, case.exact.sigma, case.exact.p,
                                case.hydro_mode_for(kind), mesh_id=f"n{n}"))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        fit = fit_rate(rows)
    r = fit.rates
    print(f"{kind:10s} disp {r['l2_disp']:.2f}  energy {r['energy']:.2f}  "
          f"hydro {r['l2_hydro']:.2f}")
