import csv
import io
import json

import pytest

from qsdensity.cli import main


@pytest.fixture
def wp_file(tmp_path):
    path = tmp_path / "wp.json"
    path.write_text(json.dumps({"mode": "weighted", "weights": [1, 1, 2], "field": {"p": 3, "a": 1}}))
    return str(path)


@pytest.fixture
def plane_file(tmp_path):
    path = tmp_path / "p2.json"
    spec = {"mode": "fan", "rays": [[1, 0], [0, 1], [-1, -1]], "max_cones": [[0, 1], [1, 2], [0, 2]], "field": {"p": 2, "a": 1}}
    path.write_text(json.dumps(spec))
    return str(path)


def run(capsys, *argv):
    rc = main(list(argv))
    out = capsys.readouterr()
    return rc, out.out, out.err


def test_classgroup_and_basis(capsys, wp_file):
    rc, out, _ = run(capsys, "--variety", wp_file, "classgroup")
    assert rc == 0 and json.loads(out)["free_rank"] == 1
    rc, out, _ = run(capsys, "--variety", wp_file, "basis", "--divisor", "O(4)")
    assert json.loads(out)["size"] == 9


def test_points_csv(capsys, wp_file):
    rc, out, _ = run(capsys, "--variety", wp_file, "points", "--max-degree", "1")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 13
    assert sum(int(r["is_singular_locus"]) for r in rows) == 1


def test_nu_command(capsys, wp_file):
    rc, out, _ = run(capsys, "--variety", wp_file, "nu", "--divisor", "O(1)", "--point", "singular:0")
    res = json.loads(out)
    assert rc == 0 and res["nu"] == 2 and res["certificate"] in ("exact", "heuristic")
    rc, out, _ = run(capsys, "--variety", wp_file, "nu", "--divisor", "O(1)", "--point", "1,2,1")
    assert json.loads(out)["certificate"] == "smooth"


def test_density_and_zeta(capsys, plane_file):
    rc, out, _ = run(capsys, "--variety", plane_file, "zeta", "--trunc-degree", "2")
    res = json.loads(out)
    assert res["exact"] and res["value_rational"]
    for formula in ("main", "finite", "scheme", "taylor"):
        rc, out, _ = run(capsys, "--variety", plane_file, "density", "--divisor", "2", "--formula", formula, "--s", "2", "--trunc-degree", "2")
        assert rc == 0 and 0 <= json.loads(out)["value_decimal"] <= 1


def test_mu_csv(capsys, plane_file):
    rc, out, _ = run(capsys, "--variety", plane_file, "mu", "--a-max", "1")
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["a", "mu_num", "mu_den", "method", "ci_halfwidth"]
    assert rows[1][:3] == ["0", "7", "8"] and rows[2][:3] == ["1", "1", "16"]


def test_sample_with_config(capsys, plane_file, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"variety": plane_file, "D": 2, "E": 1, "ks": [0], "scan_degree": 1}))
    rc, out, _ = run(capsys, "sample", "--config", str(cfg))
    assert rc == 0 and out.startswith("k,predicate")
    cfg.write_text(json.dumps({"variety": plane_file, "D": 2, "bogus": 1}))
    rc, _, err = run(capsys, "sample", "--config", str(cfg))
    assert rc == 2 and "bogus" in err


def test_exit_codes(capsys, plane_file, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"mode": "weighted", "weights": [1, 1, 2], "field": {"p": 4, "a": 1}}))
    assert run(capsys, "--variety", str(bad), "classgroup")[0] == 2
    assert run(capsys, "--variety", plane_file, "--cap", "10", "sample", "--divisor", "3")[0] == 3
    assert run(capsys, "classgroup")[0] == 2


def test_verify_subset(capsys):
    rc, out, _ = run(capsys, "verify", "--only", "7")
    assert rc == 0 and out.startswith("[PASS] criterion  7")
