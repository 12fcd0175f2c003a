import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from shvem.cli import main
from shvem.mesh import mesh_io_read
from shvem.study import StudyConfig, run_study
from shvem.vtk import read_vtk_scalars

from reference_values import THICK_BEAM_LEVELS, THICK_BEAM_TIP


def read_csv(path):
    with open(path) as fh:
        return list(csv.reader(fh))


def test_empty_formulation_list(tmp_path):
    with pytest.raises(ValueError, match="nothing to run"):
        run_study(StudyConfig(case="manufactured", formulations=[], out=str(tmp_path)))


def test_unknown_config_key_and_study(tmp_path):
    with pytest.raises(ValueError):
        StudyConfig.from_dict({"study": "convergence", "mesh_size": 3})
    with pytest.raises(ValueError):
        run_study(StudyConfig(study="fatigue", out=str(tmp_path)))


def test_convergence_rerun_is_byte_identical(tmp_path):
    cfg = dict(study="convergence", case="manufactured", formulations=["sh15", "psh12"],
               levels=[2, 4, 8], family="perturbed")
    outs = []
    for name in ("a", "b"):
        res = run_study(StudyConfig(**cfg, out=str(tmp_path / name)))
        assert res.ok
        outs.append(res.files)
    names = [f.split("/")[-1] for f in outs[0]]
    assert "results_manufactured.csv" in names and "rates_manufactured.csv" in names
    for a, b in zip(*outs):
        assert open(a, "rb").read() == open(b, "rb").read()
    rows = read_csv(tmp_path / "a" / "errors_manufactured_psh12_perturbed.csv")
    assert rows[0] == ["mesh_id", "h", "n_dofs", "l2_disp", "energy", "l2_hydro"]
    assert len(rows) == 4


def test_failed_cells_are_recorded(tmp_path):
    res = run_study(StudyConfig(case="punch", formulations=["sh15"], levels=[2, 3, 4],
                                out=str(tmp_path)))
    assert len(res.failures) == 1
    rows = read_csv(tmp_path / "results_punch.csv")
    status = [r[-1] for r in rows[1:]]
    assert status[0] == "ok" and status[1].startswith("failed: MeshError") and status[2] == "ok"


def test_table_a3_layout(tmp_path):
    res = run_study(StudyConfig(study="table_a3", out=str(tmp_path)))
    rows = read_csv(res.files[0])
    assert rows[0] == ["mesh", "sh15", "psh12", "sh9_stab", "sh11_stab"]
    assert [r[0] for r in rows[1:]] == [f"{n}x{n}" for n in THICK_BEAM_LEVELS]
    grid = np.array([[float(v) for v in r[1:]] for r in rows[1:]])
    assert grid.shape == (5, 5 - 1)
    ref = np.array([THICK_BEAM_TIP[k] for k in rows[0][1:]]).T
    np.testing.assert_allclose(grid, ref, atol=0.005)


def test_alpha_and_eigen_studies(tmp_path):
    res = run_study(StudyConfig(study="alpha_sensitivity", alpha_mult=[1e-4, 1e-1],
                                levels=[4, 8, 16], out=str(tmp_path)))
    rows = read_csv(res.files[0])
    assert rows[0] == ["alpha_mult", "level", "tip_uy", "tip_rel_error", "status"]
    assert len(rows) == 7
    res = run_study(StudyConfig(study="eigen_tables", formulations=["sh15"], out=str(tmp_path)))
    rows = read_csv(res.files[0])
    assert [r[0] for r in rows[1:]] == ["regular", "nonconvex"]


def test_vtk_output(tmp_path):
    res = run_study(StudyConfig(case="pressurized_cylinder", formulations=["psh12"],
                                levels=[2, 4, 8], vtk=True, out=str(tmp_path)))
    vtk = [f for f in res.files if f.endswith(".vtk")]
    assert len(vtk) == 3
    p = read_vtk_scalars(vtk[-1], "hydrostatic_stress_mean")
    assert p.shape == (128,)
    assert np.median(np.abs(p / 4166.528 - 1)) < 0.02
    assert read_vtk_scalars(vtk[-1], "stress").shape == (128, 3)


# ---- command line ------------------------------------------------------------

def test_cli_run_and_exit_codes(tmp_path, capsys):
    cfg = tmp_path / "ok.json"
    cfg.write_text(json.dumps({"case": "manufactured", "formulations": ["sh9_stab"],
                               "levels": [2, 4, 8]}))
    assert main(["run", str(cfg), "--out", str(tmp_path / "o1")]) == 0
    assert (tmp_path / "o1" / "rates_manufactured.csv").exists()
    bad = tmp_path / "partial.json"
    bad.write_text(json.dumps({"case": "punch", "formulations": ["sh15"], "levels": [2, 3]}))
    assert main(["run", str(bad), "--out", str(tmp_path / "o2")]) == 2
    empty = tmp_path / "empty.json"
    empty.write_text(json.dumps({"case": "punch", "formulations": []}))
    assert main(["run", str(empty), "--out", str(tmp_path / "o3")]) == 1
    assert "nothing to run" in capsys.readouterr().err
    assert main(["run", str(tmp_path / "missing.json")]) == 1


def test_cli_mesh_solve_roundtrip(tmp_path):
    m = tmp_path / "m.json"
    assert main(["mesh", "gen", "manufactured", "--nx", "4", "--case-family", "cross",
                 "--out", str(m)]) == 0
    assert mesh_io_read(m).n_elements == 64
    assert main(["mesh", "gen", "nonconvex", "--nx", "6", "--ny", "2", "--out",
                 str(tmp_path / "n.json")]) == 0
    out, vtk = tmp_path / "s.json", tmp_path / "s.vtk"
    assert main(["solve", "--mesh", str(m), "--case", "manufactured", "--formulation",
                 "psh12", "--alpha-mult", "1.0", "--vtk", str(vtk), "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    assert data["formulation"] == "psh12" and len(data["displacement"]) == data["n_nodes"]
    assert data["errors"]["l2_disp"] > 0
    assert vtk.exists()


def test_cli_eigen_scan(tmp_path):
    out = tmp_path / "scan.csv"
    assert main(["eigen-scan", "--formulation", "sh15", "--res", "4", "--out", str(out)]) == 0
    rows = read_csv(out)
    assert rows[0] == ["g1", "g2", "eig4"] and len(rows) == 17
    assert main(["eigen-scan", "--res", "3", "--g2-min", "0", "--out", str(out)]) == 2


def test_cli_mesh_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"nodes": [[0, 0], [1, 0]], "elements": [[0, 1, 0, 1, 0]]}))
    assert main(["solve", "--mesh", str(bad), "--case", "manufactured",
                 "--out", str(tmp_path / "x.json")]) == 1


def test_console_script_entry_point(tmp_path):
    r = subprocess.run([sys.executable, "-m", "shvem.cli", "--help"], capture_output=True,
                       text=True)
    assert r.returncode == 0 and "eigen-scan" in r.stdout
