import csv
import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st

from shvem.analysis import (ERROR_COLUMNS, ErrorRow, EigenScan, eigen_scan,
                            element_eigenvalues, element_mean_hydrostatic, error_norms,
                            fit_rate, fit_slope, inject_exact, recover_fields, write_error_csv,
                            write_scan_csv)
from shvem.benchmarks import get_case
from shvem.element import FORMULATIONS, STABLE_KINDS, Formulation
from shvem.material import make_material
from shvem.mesh import gen_triangle6_perturbed, gen_triangle6_structured, six_noded_triangle
from shvem.system import solve_problem

from reference_values import CYLINDER_HYDROSTATIC
from test_system import exact_stress, linear_field, patch_loads

LAW = make_material(1.0, 0.3)
INCOMP = make_material(1.0, 0.49995)


def rows_for(h, err):
    return [ErrorRow(f"m{i}", hi, 10 * i, e, e, e) for i, (hi, e) in enumerate(zip(h, err))]


# ---- rate fitting ------------------------------------------------------------

@pytest.mark.parametrize("p", [1.0, 2.0, 3.0])
def test_fit_rate_synthetic_powers(p):
    h = 0.5 ** np.arange(5)
    fit = fit_rate(rows_for(h, 3.0 * h ** p))
    assert fit.used_levels == 4
    for v in fit.rates.values():
        assert v == pytest.approx(p, abs=1e-12)
    assert fit.warning is None


def test_fit_rate_keeps_three_levels():
    h = np.array([1.0, 0.5, 0.25])
    assert fit_rate(rows_for(h, h ** 2)).used_levels == 3


def test_fit_rate_needs_three_levels():
    with pytest.raises(ValueError):
        fit_rate(rows_for([1.0, 0.5], [1.0, 0.25]))


def test_fit_rate_non_monotone_warns():
    h = np.array([1.0, 0.5, 0.25, 0.125])
    with pytest.warns(RuntimeWarning):
        fit = fit_rate(rows_for(h, [1.0, 0.1, 0.3, 0.01]))
    assert np.isfinite(fit.rates["l2_disp"])
    assert "monotone" in fit.warning


@given(st.floats(0.3, 4.0), st.floats(1e-6, 1e3))
def test_fit_slope_property(p, c):
    h = np.geomspace(1, 1e-2, 6)
    assert fit_slope(h, c * h ** p) == pytest.approx(p, abs=1e-9)


# ---- eigen analysis ----------------------------------------------------------

def test_equilateral_sh15():
    xy = six_noded_triangle((-1, 0), (1, 0), (0, np.sqrt(3)))
    e = element_eigenvalues(xy, INCOMP, "sh15")
    assert np.all(e[:3] < 1e-9 * e.sum())
    assert e[3] > 1e-6 * e.sum()


def test_scan_shape_order_and_missing():
    s = eigen_scan("sh15", INCOMP, (-1, 1), (0.0, 1.0), (3, 4))
    assert s.eig4.shape == (3, 4)
    assert len(s.missing) == 3                     # the g2 = 0 column is degenerate
    assert np.isnan(s.eig4[:, 0]).all()
    assert np.all(s.eig4[:, 1:] > 0)


def test_scan_resolution_guard():
    with pytest.raises(ValueError):
        eigen_scan("sh15", INCOMP, resolution=1)


def test_unstabilized_basis_weaker_than_sh15():
    a = eigen_scan("sh11", INCOMP, resolution=20)
    b = eigen_scan("sh15", INCOMP, resolution=20)
    assert a.min() < 0.1 * b.min()


def test_penalty_parameter_lowers_peak_fourth_eigenvalue():
    peaks = [eigen_scan(Formulation("psh12", alpha_mult=m), INCOMP, resolution=12).max()
             for m in (0.1, 1.0, 10.0, 100.0)]
    assert all(b < a for a, b in zip(peaks, peaks[1:]))


def test_scan_csv(tmp_path):
    s = eigen_scan("psh12", INCOMP, resolution=(2, 3))
    p = tmp_path / "scan.csv"
    write_scan_csv(s, p)
    rows = list(csv.reader(open(p)))
    assert rows[0] == ["g1", "g2", "eig4"]
    assert len(rows) == 7
    assert float(rows[1][0]) == -10.0 and float(rows[3][1]) == 10.0


# ---- error norms -------------------------------------------------------------

@pytest.mark.parametrize("kind", sorted(FORMULATIONS))
def test_linear_field_injection_has_zero_error(kind):
    mesh = gen_triangle6_perturbed(gen_triangle6_structured(3, 3, split="cross"), 0.2, 4)
    sig = exact_stress(LAW)
    sol = inject_exact(mesh, kind, LAW, lambda x, y: linear_field(x, y))
    row = error_norms(sol, lambda x, y: linear_field(x, y),
                      lambda x, y: np.broadcast_to(sig, (len(x), 3)))
    assert row.l2_disp < 1e-9 and row.energy < 1e-9 and row.l2_hydro < 1e-9


def test_constant_stress_energy_zero_with_exact_beta():
    mesh = gen_triangle6_structured(2, 2)
    sig = np.array([1.0, -2.0, 0.5])
    for kind in FORMULATIONS:
        sol = inject_exact(mesh, kind, LAW, lambda x, y: (0 * x, 0 * y),
                           lambda x, y: np.broadcast_to(sig, (len(x), 3)))
        row = error_norms(sol, lambda x, y: (0 * x, 0 * y),
                          lambda x, y: np.broadcast_to(sig, (len(x), 3)))
        assert row.energy < 1e-12


def test_hydro_modes_agree_for_constant_pressure():
    mesh = gen_triangle6_structured(2, 2, split="cross")
    sol = solve_problem(mesh, "sh15", LAW, patch_loads(mesh))
    args = (sol, lambda x, y: linear_field(x, y),
            lambda x, y: np.broadcast_to(exact_stress(LAW), (len(x), 3)))
    a = error_norms(*args, hydro_mode="pointwise")
    b = error_norms(*args, hydro_mode="element_average")
    assert abs(a.l2_hydro - b.l2_hydro) < 1e-12
    with pytest.raises(ValueError):
        error_norms(*args, hydro_mode="nodal")


def test_manufactured_displacement_error_quarters():
    case = get_case("manufactured")
    errs = []
    for n in (8, 16):
        sol = solve_problem(case.mesh(n), "sh15", case.law, case.loads)
        errs.append(error_norms(sol, case.exact.u, case.exact.sigma).l2_disp)
    assert 3.3 < errs[0] / errs[1] < 4.7


def test_error_csv(tmp_path):
    p = tmp_path / "e.csv"
    write_error_csv(rows_for([1.0, 0.5], [0.1, 0.025]), p)
    rows = list(csv.reader(open(p)))
    assert tuple(rows[0]) == ERROR_COLUMNS
    assert float(rows[2][3]) == 0.025


# ---- recovery ----------------------------------------------------------------

def test_patch_recovery_constant_stress():
    mesh = gen_triangle6_structured(3, 2, split="cross")
    for kind in STABLE_KINDS:
        sol = solve_problem(mesh, kind, LAW, patch_loads(mesh))
        rec = recover_fields(sol, "nodes+centroid")
        assert rec.sigma.shape == (mesh.n_elements, 7, 3)
        np.testing.assert_allclose(rec.sigma, np.broadcast_to(exact_stress(LAW), rec.sigma.shape),
                                   atol=1e-10)
        eps = LAW.Cinv @ exact_stress(LAW)
        np.testing.assert_allclose(rec.trace, eps[0] + eps[1], atol=1e-10)


def test_recover_bad_sample():
    mesh = gen_triangle6_structured(1, 1)
    sol = solve_problem(mesh, "sh15", LAW, patch_loads(mesh))
    with pytest.raises(ValueError):
        recover_fields(sol, "gauss")


@pytest.mark.parametrize("kind", STABLE_KINDS)
def test_cylinder_injection_reproduces_hydrostatic_value(kind):
    case = get_case("pressurized_cylinder")
    sol = inject_exact(case.mesh(4), kind, case.law, case.exact.u, case.exact.sigma)
    p = element_mean_hydrostatic(sol)
    np.testing.assert_allclose(p, CYLINDER_HYDROSTATIC, rtol=1e-6)
