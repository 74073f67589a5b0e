import csv
import io
import json

import numpy as np
import pytest

from muckenhoupt import cli, generate
from muckenhoupt import io as mio

FIXTURES = __import__("pathlib").Path(__file__).parent / "fixtures"
SPACE = str(FIXTURES / "two_point.json")
WEIGHT = str(FIXTURES / "two_point_weight.json")
FUNC = str(FIXTURES / "two_point_function.json")


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_space_roundtrip(tmp_path):
    space = generate("grid1d", n=8, a=-1, b=1, cell_centered=True)
    path = tmp_path / "s.json"
    mio.save_space(space, path)
    back = mio.load_space(path)
    assert np.array_equal(back.dist, space.dist)
    assert np.array_equal(back.coords, space.coords)


def test_space_file_size_mismatch(tmp_path):
    path = tmp_path / "s.json"
    path.write_text(json.dumps({"n": 3, "distances": [[0, 1], [1, 0]], "measure": [1, 1]}))
    with pytest.raises(ValueError):
        mio.load_space(path)


def test_values_roundtrip(tmp_path):
    mio.save_values([1.5, 2.0], tmp_path / "v.json")
    assert mio.load_values(tmp_path / "v.json").tolist() == [1.5, 2.0]


def test_to_jsonable_nonfinite():
    assert mio.to_jsonable({"a": np.float64(np.inf), "b": np.arange(2)}) == {"a": "inf", "b": [0, 1]}


def test_csv_needs_rows():
    with pytest.raises(ValueError):
        mio.dumps_report({"a": 1}, "csv")


def test_compute_ap_fixture(capsys):
    code, out, _ = run(capsys, "compute", "ap", "--space", SPACE, "--weight", WEIGHT, "--p", "2")
    rep = json.loads(out)
    assert code == 0
    assert rep["constant"] == pytest.approx(1.5625)
    assert rep["inputs"]["space"]["sha256"] == mio.file_hash(SPACE)


def test_compute_ap_shifted(capsys):
    code, out, _ = run(capsys, "compute", "ap", "--space", SPACE, "--weight", WEIGHT, "--p", "2", "--eps", "1e-6")
    assert code == 0
    assert json.loads(out)["shifted_constant"]["value"] < 1.5625


def test_compute_doubling_fixture(capsys):
    code, out, _ = run(capsys, "compute", "doubling", "--space", SPACE)
    assert code == 0
    assert json.loads(out)["doubling_constant"] == 2.0


def test_compute_maximal_csv(capsys):
    code, out, _ = run(capsys, "compute", "maximal", "--space", SPACE, "--function", FUNC, "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0
    assert [float(r["Mf"]) for r in rows] == [1.0, 0.5]


def test_compute_truncate_and_whitney(capsys):
    code, out, _ = run(capsys, "compute", "truncate", "--space", SPACE, "--function", FUNC, "--t", "0.75")
    assert code == 0
    assert json.loads(out)["f_t"] == [1.0, 0.0]
    code, out, _ = run(capsys, "compute", "whitney", "--space", SPACE, "--function", FUNC, "--t", "0.75")
    assert code == 0
    assert json.loads(out)["balls"][0]["radius"] == 0.125


def test_truncate_below_min_is_usage_error(capsys):
    code, _, err = run(capsys, "compute", "truncate", "--space", SPACE, "--function", FUNC, "--t", "0.1")
    assert code == 2
    assert "E_t = X" in err


def test_missing_flag_and_bad_p(capsys):
    assert run(capsys, "compute", "ap", "--space", SPACE)[0] == 2
    assert run(capsys, "compute", "ap", "--space", SPACE, "--p", "1")[0] == 2
    code, _, err = run(capsys, "verify", "lerner", "--p", "0.5")
    assert code == 2 and "1 < p" in err


def test_missing_file_is_usage_error(capsys, tmp_path):
    assert run(capsys, "compute", "doubling", "--space", str(tmp_path / "nope.json"))[0] == 2


def test_generate_deterministic(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        assert run(capsys, "generate", "random_euclidean", "--n", "12", "--seed", "4", "--out", str(path))[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_generate_grid_and_power_weight(capsys, tmp_path):
    space = tmp_path / "g.json"
    assert run(capsys, "generate", "grid1d", "--n", "64", "--a", "-1", "--b", "1", "--cell-centered",
               "--out", str(space))[0] == 0
    assert mio.load_space(space).n == 64
    code, out, _ = run(capsys, "generate", "power-weight", "--space", str(space), "--alpha", "0.5")
    assert code == 0 and len(json.loads(out)["values"]) == 64


def test_generate_bad_params(capsys):
    assert run(capsys, "generate", "grid1d", "--n", "1")[0] == 2
    assert run(capsys, "generate", "grid2d", "--nx", "3")[0] == 2


def test_verify_fixture(capsys):
    code, out, _ = run(capsys, "verify", "all", "--space", SPACE, "--weight", WEIGHT, "--p", "2")
    rep = json.loads(out)
    assert code == 0
    assert rep["failed"] == 0 and rep["passed"] > 5


def test_verify_suite_csv(capsys):
    code, out, _ = run(capsys, "verify", "duality", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0
    assert len(rows) == 150
    assert all(r["ok"] == "True" for r in rows)


def test_selfimprove_cli(capsys, tmp_path):
    space = tmp_path / "g.json"
    mio.save_space(generate("grid1d", n=32), space)
    code, out, _ = run(capsys, "selfimprove", "--space", str(space), "--p", "2")
    rep = json.loads(out)
    assert code == 0
    assert rep["ap_p_minus_eps"] == 1.0 and rep["epsilon"] > 0
    code, out, _ = run(capsys, "selfimprove", "--space", str(space), "--p", "2", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert list(rows[0]) == ["q", "sup_ratio"]


def test_module_entry_point():
    import subprocess
    import sys

    res = subprocess.run([sys.executable, "-m", "muckenhoupt", "compute", "doubling", "--space", SPACE],
                         capture_output=True, text=True)
    assert res.returncode == 0
    assert json.loads(res.stdout)["doubling_constant"] == 2.0
