import json
import math
import subprocess
import sys

import numpy as np
import pytest

from slicepi import __version__
from slicepi.cli import main, parse_unit
from slicepi.functions import axis_field, constant_function, coordinate_function, random_polynomial_function
from slicepi.geometry import BoundaryGrid
from slicepi.io import loads_slice, write_sampled
from slicepi.quaternion import unit_mul

GRID_ARGS = ["--n-polar", "12", "--n-azimuth", "16", "--nt", "32"]


@pytest.fixture
def files(tmp_path):
    grid = BoundaryGrid.build(12, 16, 32)
    paths = {}
    for name, phi in {
        "const": constant_function(grid, [0.5, -1.0, 2.0, 0.25]),
        "coord": coordinate_function(grid, 1),
        "axis": axis_field(grid),
        "random": random_polynomial_function(grid, np.random.default_rng(1)),
    }.items():
        paths[name] = tmp_path / f"{name}.csv"
        write_sampled(paths[name], phi)
    paths["grid"] = grid
    return paths


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_norm_bound_values(capsys):
    code, out, _ = run(["norm", "inf", "bound"], capsys)
    assert code == 0 and json.loads(out)["upper_bound"] == "1.33333333"
    code, out, _ = run(["norm", "4", "bound"], capsys)
    doc = json.loads(out)
    assert doc["upper_bound"] == "1.36346324"
    assert doc["version"] == __version__ and doc["config"]["n_polar"] == 48


def test_norm_extremal(capsys):
    code, out, _ = run(["norm", "inf", "extremal"], capsys)
    assert code == 0
    assert abs(float(json.loads(out)["ratio"]) - 4.0 / 3.0) < 1e-5


def test_norm_search_p2(capsys, tmp_path):
    witness = tmp_path / "w.csv"
    code, out, _ = run(["norm", "2", "search", "--iters", "5", "--witness", str(witness), *GRID_ARGS], capsys)
    doc = json.loads(out)
    assert code == 0
    assert abs(float(doc["lower_bound"]) - 1.0) <= 1e-6
    assert doc["witness_file"] == str(witness) and witness.exists()


@pytest.mark.parametrize("p", ["1", "inf"])
def test_norm_search_rejects_endpoints(capsys, p):
    code, _, err = run(["norm", p, "search", *GRID_ARGS], capsys)
    assert code == 2 and "extremal" in err


def test_bad_exponent_is_usage_error(capsys):
    assert run(["norm", "0.5", "bound"], capsys)[0] == 2
    assert run(["norm", "abc", "bound"], capsys)[0] == 2


def test_project_constant(files, capsys, tmp_path):
    out = tmp_path / "o.csv"
    code, _, err = run(["project", str(files["const"]), "-o", str(out)], capsys)
    assert code == 0
    f = loads_slice(out.read_text())
    assert np.allclose(f.a, [0.5, -1.0, 2.0, 0.25], atol=1e-14) and np.allclose(f.b, 0.0, atol=1e-14)
    summary = json.loads(err)
    assert summary["route"] == "boundary" and float(summary["slice_defect_after"]) < 1e-12


def test_project_coordinate(files, capsys, tmp_path):
    out = tmp_path / "o.csv"
    assert run(["project", str(files["coord"]), "-o", str(out)], capsys)[0] == 0
    f = loads_slice(out.read_text())
    grid = files["grid"]
    i = np.array([0.0, 1.0, 0.0, 0.0])
    expected = unit_mul(grid.sphere.nodes[:, None, :], (-np.sin(grid.circle.nodes)[:, None] * i / 3.0)[None])
    assert np.abs(f.on_grid(grid).values - expected).max() < 1e-10


def test_routes_agree_through_files(files, capsys, tmp_path):
    outs = {}
    for route in ("fourier", "boundary"):
        path = tmp_path / f"{route}.csv"
        assert run(["project", str(files["random"]), "--route", route, "-o", str(path)], capsys)[0] == 0
        outs[route] = loads_slice(path.read_text())
    assert np.abs(outs["fourier"].a - outs["boundary"].a).max() < 1e-10
    assert np.abs(outs["fourier"].b - outs["boundary"].b).max() < 1e-10


def test_project_interior_route(files, capsys, tmp_path):
    out = tmp_path / "o.csv"
    assert run(["project", str(files["const"]), "--route", "interior", "--r", "0.5", "-o", str(out)], capsys)[0] == 0
    assert np.allclose(loads_slice(out.read_text()).a, [0.5, -1.0, 2.0, 0.25], atol=1e-13)
    assert run(["project", str(files["const"]), "--route", "interior"], capsys)[0] == 2


def test_project_refuses_ill_defined(files, capsys, tmp_path):
    code, out, err = run(["project", str(files["axis"])], capsys)
    assert code == 1 and out == ""
    assert "defect 2 " in err and "polar_idx=" in err and "--force" in err
    forced = tmp_path / "forced.csv"
    assert run(["project", str(files["axis"]), "--force", "-o", str(forced)], capsys)[0] == 0
    f = loads_slice(forced.read_text())
    assert np.allclose(f.b, [1.0, 0, 0, 0], atol=1e-12)


def test_project_tolerance_override(files, capsys):
    assert run(["project", str(files["axis"]), "--tol", "well_defined=3"], capsys)[0] == 0


def test_project_missing_or_broken_file(tmp_path, capsys):
    assert run(["project", str(tmp_path / "nope.csv")], capsys)[0] == 2
    bad = tmp_path / "bad.csv"
    bad.write_text("garbage\n")
    assert run(["project", str(bad)], capsys)[0] == 2


def test_outputs_are_deterministic(files, tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        assert run(["norm", "4", "search", "--iters", "3", "--restarts", "1", "--seed", "5", *GRID_ARGS, "-o", str(path)], capsys)[0] == 0
    assert a.read_bytes() == b.read_bytes()
    c, d = tmp_path / "c.csv", tmp_path / "d.csv"
    for path in (c, d):
        run(["project", str(files["random"]), "-o", str(path)], capsys)
    assert c.read_bytes() == d.read_bytes()


def test_kernel_eval(capsys):
    code, out, _ = run(["kernel-eval", "0", "i", "0.3", "j", "1.2"], capsys)
    assert code == 0 and out.split() == ["1", "0", "0", "0"]
    code, out, _ = run(["kernel-eval", "0.5", "k", "0.4", "k", "0.1"], capsys)
    expected = 0.75 / (1.25 - math.cos(0.3))
    assert abs(float(out.split()[0]) - expected) < 1e-8
    assert run(["kernel-eval", "1", "i", "0", "i", "0"], capsys)[0] == 2
    assert run(["kernel-eval", "0.5", "q", "0", "i", "0"], capsys)[0] == 2


def test_parse_unit():
    assert np.array_equal(parse_unit("-j"), [0.0, -1.0, 0.0])
    assert np.allclose(parse_unit("0.6,0,0.8"), [0.6, 0.0, 0.8])


def test_verify_coarse_grid_fails_on_sphere_constant(capsys):
    code, out, _ = run(["verify", "--n-polar", "4", "--n-azimuth", "8", "--nt", "16"], capsys)
    assert code == 1
    row = next(line for line in out.splitlines() if line.startswith("sferica 4/3"))
    assert row.rstrip().endswith("FAIL")


def test_verify_json_matches_table(capsys):
    args = ["verify", "--n-polar", "6", "--n-azimuth", "12", "--nt", "16"]
    _, table, _ = run(args, capsys)
    _, text, _ = run([*args, "--json"], capsys)
    doc = json.loads(text)
    rows = {line[:40].strip(): line.split() for line in table.splitlines()[2:-1]}
    for check in doc["checks"]:
        status = "PASS" if check["passed"] else "FAIL"
        assert rows[check["name"]][-1] == status
        assert f"{check['computed']:.9g}" in rows[check["name"]]
    assert doc["config"]["n_polar"] == 6 and doc["version"] == __version__


def test_usage_errors(capsys):
    assert run([], capsys)[0] == 2
    assert run(["verify", "--tol", "nonsense=1"], capsys)[0] == 2
    assert run(["verify", "--n-azimuth", "7"], capsys)[0] == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "slicepi", "norm", "2", "bound"], capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["upper_bound"] == "1.41421356"
