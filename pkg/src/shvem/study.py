"""Study drivers: sweep cases, formulations and mesh levels, write CSV files."""

from __future__ import annotations

import csv
import json
import logging
import os
import warnings
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import analysis
from .benchmarks import get_case
from .element import STABLE_KINDS, Formulation
from .material import make_material
from .system import solve_problem

log = logging.getLogger(__name__)

STUDIES = ("convergence", "table_a3", "eigen_tables", "alpha_sensitivity")


@dataclass
class StudyConfig:
    """What to run and where to put it.

    ``alpha_mult`` may be a single value, a list (swept) or None for the
    default penalty parameter.  ``hydro_mode=None`` uses the case default.
    """
    study: str = "convergence"
    case: Optional[str] = None
    formulations: Sequence[str] = ()
    levels: Sequence[int] = ()
    family: Optional[str] = None
    alpha_mult: object = None
    hydro_mode: Optional[str] = None
    out: str = "out"
    vtk: bool = False

    @classmethod
    def from_dict(cls, data: dict) -> "StudyConfig":
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown study config keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_json(cls, path) -> "StudyConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


@dataclass
class StudyResult:
    files: list = field(default_factory=list)
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return repr(v) if np.isfinite(v) else "nan"
    if v is None:
        return ""
    return str(v)


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(v) for v in r])


def _alpha_list(value):
    if value is None or isinstance(value, (int, float)):
        return [value]
    return list(value)


def run_study(config: StudyConfig) -> StudyResult:
    if config.study not in STUDIES:
        raise ValueError(f"unknown study {config.study!r}; expected one of {STUDIES}")
    os.makedirs(config.out, exist_ok=True)
    runner = {
        "convergence": _run_convergence,
        "table_a3": _run_table_a3,
        "eigen_tables": _run_eigen_tables,
        "alpha_sensitivity": _run_alpha_sensitivity,
    }[config.study]
    return runner(config)


def _solve_cell(case, kind, alpha_mult, mesh):
    form = Formulation(kind, alpha_mult=alpha_mult)
    return solve_problem(mesh, form, case.law, case.loads)


def _run_convergence(cfg: StudyConfig) -> StudyResult:
    if not cfg.formulations:
        raise ValueError("nothing to run: empty formulation list")
    if cfg.case is None:
        raise ValueError("convergence study needs a case")
    case = get_case(cfg.case)
    family = cfg.family or case.families[0]
    levels = list(cfg.levels or case.levels)
    result = StudyResult()
    rows, rate_rows, qkeys = [], [], set()
    for kind in cfg.formulations:
        hydro_mode = cfg.hydro_mode or case.hydro_mode_for(kind)
        for am in _alpha_list(cfg.alpha_mult):
            errs = []
            for n in levels:
                mesh_id = f"{family}-{n}"
                rec = dict(case=case.name, family=family, formulation=kind, alpha_mult=am,
                           level=n, mesh_id=mesh_id, status="ok")
                try:
                    mesh = case.mesh(n, family)
                    sol = _solve_cell(case, kind, am, mesh)
                    rec.update(h=mesh.h_max(), n_dofs=2 * mesh.n_nodes)
                    if case.exact is not None:
                        er = analysis.error_norms(sol, case.exact.u, case.exact.sigma,
                                                  case.exact.p, hydro_mode, mesh_id=mesh_id)
                        errs.append(er)
                        rec.update(l2_disp=er.l2_disp, energy=er.energy, l2_hydro=er.l2_hydro)
                    q = case.quantities(sol)
                    qkeys.update(q)
                    rec.update(q)
                    if cfg.vtk:
                        from .vtk import write_vtk
                        path = os.path.join(cfg.out, f"{case.name}_{kind}_{mesh_id}.vtk")
                        write_vtk(path, sol)
                        result.files.append(path)
                except Exception as exc:  # record the failure, keep going
                    log.warning("cell %s/%s/%s failed: %s", case.name, kind, mesh_id, exc)
                    rec["status"] = f"failed: {type(exc).__name__}: {exc}"
                    result.failures.append(rec)
                rows.append(rec)
            tag = kind if am is None else f"{kind}_a{am:g}"
            if errs:
                path = os.path.join(cfg.out, f"errors_{case.name}_{tag}_{family}.csv")
                analysis.write_error_csv(errs, path)
                result.files.append(path)
            if len(errs) >= 3:
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore", RuntimeWarning)
                    fit = analysis.fit_rate(errs)
                rate_rows.append((case.name, family, kind, am, fit.used_levels,
                                  fit.rates["l2_disp"], fit.rates["energy"],
                                  fit.rates["l2_hydro"], fit.warning or ""))
    base = ["case", "family", "formulation", "alpha_mult", "level", "mesh_id", "h", "n_dofs",
            "l2_disp", "energy", "l2_hydro"]
    header = base + sorted(qkeys) + ["status"]
    path = os.path.join(cfg.out, f"results_{case.name}.csv")
    _write_csv(path, header, ([r.get(k) for k in header] for r in rows))
    result.files.append(path)
    if rate_rows:
        path = os.path.join(cfg.out, f"rates_{case.name}.csv")
        _write_csv(path, ["case", "family", "formulation", "alpha_mult", "levels_used",
                          "rate_l2_disp", "rate_energy", "rate_l2_hydro", "warning"], rate_rows)
        result.files.append(path)
    return result


def table_a3(formulations=STABLE_KINDS, levels=(1, 2, 4, 8, 16)) -> dict:
    """Normalized tip deflection of the thick cantilever, ``{kind: [per level]}``."""
    case = get_case("cantilever_thick")
    out = {}
    for kind in formulations:
        vals = []
        for n in levels:
            sol = solve_problem(case.mesh(n, "square_grid"), kind, case.law, case.loads)
            vals.append(case.quantities(sol)["tip_normalized"])
        out[kind] = vals
    return out


def _run_table_a3(cfg: StudyConfig) -> StudyResult:
    kinds = list(cfg.formulations or STABLE_KINDS)
    levels = list(cfg.levels or (1, 2, 4, 8, 16))
    case = get_case("cantilever_thick")
    result = StudyResult()
    grid = {k: [] for k in kinds}
    for kind in kinds:
        for n in levels:
            try:
                sol = solve_problem(case.mesh(n, "square_grid"), kind, case.law, case.loads)
                grid[kind].append(case.quantities(sol)["tip_normalized"])
            except Exception as exc:
                result.failures.append(dict(formulation=kind, level=n, status=str(exc)))
                grid[kind].append(float("nan"))
    path = os.path.join(cfg.out, "table_a3.csv")
    _write_csv(path, ["mesh"] + kinds,
               ([f"{n}x{n}"] + [grid[k][i] for k in kinds] for i, n in enumerate(levels)))
    result.files.append(path)
    return result


def eigen_tables(formulations=STABLE_KINDS, E_Y=1.0, nu=0.4999999) -> list:
    """Five largest stiffness eigenvalues on the two reference elements."""
    law = make_material(E_Y, nu)
    rows = []
    for name, xy in (("regular", analysis.REGULAR_TRIANGLE),
                     ("nonconvex", analysis.NONCONVEX_HEXAGON)):
        for kind in formulations:
            e = analysis.largest_eigenvalues(xy, law, kind)[::-1]
            rows.append((name, kind, *e))
    return rows


def _run_eigen_tables(cfg: StudyConfig) -> StudyResult:
    kinds = list(cfg.formulations or STABLE_KINDS)
    path = os.path.join(cfg.out, "eigen_tables.csv")
    _write_csv(path, ["element", "formulation", "lam1", "lam2", "lam3", "lam4", "lam5"],
               eigen_tables(kinds))
    return StudyResult([path])


def _run_alpha_sensitivity(cfg: StudyConfig) -> StudyResult:
    case = get_case(cfg.case or "cantilever_thin")
    levels = list(cfg.levels or (8, 16, 32, 64))
    mults = _alpha_list(cfg.alpha_mult if cfg.alpha_mult is not None
                        else [1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0])
    family = cfg.family or "structured"
    tip = case.params["tip_exact"]
    result = StudyResult()
    rows = []
    for am in mults:
        for n in levels:
            try:
                sol = _solve_cell(case, "psh12", am, case.mesh(n, family))
                uy = case.quantities(sol)["tip_uy"]
                rows.append((am, n, uy, abs(uy - tip) / abs(tip), "ok"))
            except Exception as exc:
                rows.append((am, n, float("nan"), float("nan"), f"failed: {exc}"))
                result.failures.append(dict(alpha_mult=am, level=n, status=str(exc)))
    path = os.path.join(cfg.out, f"alpha_sensitivity_{case.name}.csv")
    _write_csv(path, ["alpha_mult", "level", "tip_uy", "tip_rel_error", "status"], rows)
    result.files.append(path)
    return result


def config_dict(cfg: StudyConfig) -> dict:
    return asdict(cfg)
