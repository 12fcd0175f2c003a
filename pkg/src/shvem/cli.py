"""``vemh`` command line: studies, eigen scans, mesh generation and single solves.

Exit status is 0 on success, 2 when some study cells failed and 1 on errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

import numpy as np

from . import analysis, mesh as meshmod
from .benchmarks import CASES, get_case
from .element import FORMULATIONS, Formulation
from .material import make_material
from .study import StudyConfig, run_study
from .system import solve_problem


def _cmd_run(args) -> int:
    cfg = StudyConfig.from_json(args.config)
    if args.out:
        cfg.out = args.out
    res = run_study(cfg)
    for f in res.files:
        print(f)
    if res.failures:
        print(f"{len(res.failures)} cell(s) failed", file=sys.stderr)
        return 2
    return 0


def _cmd_eigen_scan(args) -> int:
    law = make_material(args.E, args.nu)
    form = Formulation(args.formulation, alpha_mult=args.alpha_mult)
    scan = analysis.eigen_scan(form, law, (args.g1_min, args.g1_max),
                               (args.g2_min, args.g2_max), args.res, workers=args.workers)
    analysis.write_scan_csv(scan, args.out)
    print(f"{args.out}: min eig4 {scan.min():.6g}, max {scan.max():.6g}, "
          f"{scan.spurious_points()} spurious point(s), {len(scan.missing)} missing")
    return 2 if scan.missing else 0


def _cmd_mesh_gen(args) -> int:
    fam = args.family
    if fam in ("structured", "cross"):
        split = "cross" if fam == "cross" else args.split
        m = meshmod.gen_triangle6_structured(args.nx, args.ny, _domain(args), split, args.diagonal)
    elif fam == "perturbed":
        base = meshmod.gen_triangle6_structured(args.nx, args.ny, _domain(args), "cross")
        m = meshmod.gen_triangle6_perturbed(base, args.magnitude, args.seed)
    elif fam == "degenerate":
        m = meshmod.gen_degenerate_strip(args.nx, args.ny, args.length, args.height, args.collapse)
    elif fam == "nonconvex":
        m = meshmod.gen_nonconvex_strip(args.nx, args.ny, args.length, args.height,
                                        args.distortion)
    elif fam in CASES:
        m = get_case(fam).mesh(args.nx, args.case_family)
    else:
        raise SystemExit(f"unknown mesh family {fam!r}")
    meshmod.mesh_io_write(m, args.out)
    print(f"{args.out}: {m.n_nodes} nodes, {m.n_elements} elements")
    return 0


def _domain(args):
    x0, x1, y0, y1 = args.domain
    return ((x0, x1), (y0, y1))


def _cmd_solve(args) -> int:
    case = get_case(args.case)
    m = meshmod.mesh_io_read(args.mesh)
    form = Formulation(args.formulation, alpha_mult=args.alpha_mult)
    sol = solve_problem(m, form, case.law, case.loads)
    out = {
        "case": case.name,
        "formulation": form.kind,
        "alpha_mult": args.alpha_mult,
        "n_nodes": m.n_nodes,
        "n_elements": m.n_elements,
        "displacement": sol.displacement().tolist(),
        "beta": [np.asarray(b).tolist() for b in sol.beta],
        "quantities": case.quantities(sol),
        "backward_error": sol.residual,
    }
    if case.exact is not None:
        er = analysis.error_norms(sol, case.exact.u, case.exact.sigma, case.exact.p,
                                  case.hydro_mode_for(form.kind), mesh_id=args.mesh)
        out["errors"] = {"h": er.h, "l2_disp": er.l2_disp, "energy": er.energy,
                         "l2_hydro": er.l2_hydro}
    with open(args.out, "w") as fh:
        json.dump(out, fh, indent=1)
    if args.vtk:
        from .vtk import write_vtk
        write_vtk(args.vtk, sol, f"{case.name} {form.kind}")
    print(args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="vemh", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run a study described by a JSON config")
    r.add_argument("config")
    r.add_argument("--out", help="override the output directory")
    r.set_defaults(func=_cmd_run)

    e = sub.add_parser("eigen-scan", help="4th eigenvalue over the (g1, g2) triangle family")
    e.add_argument("--formulation", default="sh15", choices=sorted(FORMULATIONS))
    e.add_argument("--res", type=int, default=100)
    e.add_argument("--E", type=float, default=1.0)
    e.add_argument("--nu", type=float, default=0.49995)
    e.add_argument("--alpha-mult", type=float, default=None)
    e.add_argument("--g1-min", type=float, default=-10.0)
    e.add_argument("--g1-max", type=float, default=10.0)
    e.add_argument("--g2-min", type=float, default=0.05)
    e.add_argument("--g2-max", type=float, default=10.0)
    e.add_argument("--workers", type=int, default=1)
    e.add_argument("--out", required=True)
    e.set_defaults(func=_cmd_eigen_scan)

    m = sub.add_parser("mesh", help="mesh utilities")
    msub = m.add_subparsers(dest="mesh_command", required=True)
    g = msub.add_parser("gen", help="generate a mesh and write it as JSON")
    g.add_argument("family", help="structured, cross, perturbed, degenerate, nonconvex, "
                                  "or a case name")
    g.add_argument("--nx", type=int, default=4, help="cells in x (strip: M; case: n)")
    g.add_argument("--ny", type=int, default=4, help="cells in y (strip: N)")
    g.add_argument("--domain", type=float, nargs=4, default=(0.0, 1.0, 0.0, 1.0),
                   metavar=("X0", "X1", "Y0", "Y1"))
    g.add_argument("--split", default="diagonal", choices=("diagonal", "cross"))
    g.add_argument("--diagonal", default="up", choices=("up", "down"))
    g.add_argument("--magnitude", type=float, default=0.2)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--length", type=float, default=32.0)
    g.add_argument("--height", type=float, default=1.0)
    g.add_argument("--collapse", type=float, default=0.9)
    g.add_argument("--distortion", type=float, default=0.3)
    g.add_argument("--case-family", default=None, help="mesh family of a case mesh")
    g.add_argument("--out", required=True)
    g.set_defaults(func=_cmd_mesh_gen)

    s = sub.add_parser("solve", help="solve one benchmark case on a mesh file")
    s.add_argument("--mesh", required=True)
    s.add_argument("--case", required=True, choices=sorted(CASES))
    s.add_argument("--formulation", default="sh15", choices=sorted(FORMULATIONS))
    s.add_argument("--alpha-mult", type=float, default=None)
    s.add_argument("--vtk", default=None, help="also write a legacy VTK file")
    s.add_argument("--out", required=True)
    s.set_defaults(func=_cmd_solve)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ValueError, OSError, meshmod.MeshError) as exc:
        print(f"vemh: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
