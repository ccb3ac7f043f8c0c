import json

import numpy as np
import pytest

from qsdensity.errors import CapExceeded, ValidationError
from qsdensity.harness import (
    ExperimentConfig,
    Sieve,
    enumerate_sections,
    run_experiment,
    sample_sections,
    singular_points,
)
from qsdensity.points import closed_points
from qsdensity.quasismooth import is_quasismooth_at
from qsdensity.toric import P, PxP, WP


def test_enumeration_order_and_cap():
    X = P(1, 2)
    secs = list(enumerate_sections(X, 1))
    assert [s.coeffs for s in secs] == [(0, 0), (0, 1), (1, 0), (1, 1)]
    with pytest.raises(CapExceeded):
        list(enumerate_sections(P(2, 2), 3, cap=100))


def test_sampling_is_seeded():
    X = P(2, 3)
    a = [s.coeffs for s in sample_sections(X, 2, 5, seed=1)]
    b = [s.coeffs for s in sample_sections(X, 2, 5, seed=1)]
    assert a == b


@pytest.mark.parametrize("X,cls", [(P(2, 2), 2), (P(2, 3), 1), (WP((1, 1, 2), 3), 2), (PxP(1, 1, 2), (1, 1))])
def test_sieve_matches_pointwise_check(X, cls):
    sv = Sieve(X, cls, 2)
    pts = closed_points(X, 2)
    assert len(sv.points) == len(pts)
    rng = np.random.default_rng(0)
    B = len(X.monomial_basis(cls))
    coeffs = rng.integers(0, X.q, size=(30, B))
    mask = sv.singular_mask(coeffs)
    for row, m in zip(coeffs, mask):
        f = X.section(cls, [int(c) for c in row])
        expect = [not is_quasismooth_at(f, pt) for pt in sv.points]
        assert list(m) == expect


def test_zero_section_is_singular_everywhere():
    X = P(2, 2)
    f = X.section(2, [0] * 6)
    pts, status = singular_points(f, 1)
    assert len(pts) == 7 and status == "Certified"
    g = X.section(3, [1] * 10)
    assert singular_points(g, 2)[1] == "BoundedScan"


def _brute_smooth_conics(q):
    X = P(2, q)
    pts = closed_points(X, 1)
    return sum(all(is_quasismooth_at(f, pt) for pt in pts) for f in enumerate_sections(X, 2))


def test_exhaustive_experiment_counts():
    X = P(2, 2)
    rep = run_experiment(ExperimentConfig(X, 0, 1, ks=(2,), scan_degree=1, s_values=(1, 2), trunc_degree=4))
    row = rep.row(2, "quasismooth")
    assert row.total == 64 and row.certified
    assert row.count == _brute_smooth_conics(2)
    assert rep.row(2, "points<1").count == row.count
    assert rep.row(2, "points<2").count >= row.count
    assert rep.complete


def test_sample_mode_is_partition_independent(tmp_path):
    X = P(2, 3)
    kw = dict(ks=(1,), mode="sample", count=500, seed=3, scan_degree=1, trunc_degree=3)
    one = run_experiment(ExperimentConfig(X, 1, 1, threads=1, **kw))
    three = run_experiment(
        ExperimentConfig(X, 1, 1, threads=3, out_csv=str(tmp_path / "r.csv"), out_json=str(tmp_path / "r.json"), **kw)
    )
    assert one.row(1, "quasismooth").count == three.row(1, "quasismooth").count
    r = one.row(1, "quasismooth")
    assert r.ci_lo <= r.fraction <= r.ci_hi
    header = (tmp_path / "r.csv").read_text().splitlines()[0]
    assert header == "k,predicate,count,total,fraction,ci_lo,ci_hi,analytic,tail,certified"
    assert json.loads((tmp_path / "r.json").read_text())["q"] == 3


def test_length_predicates():
    X = P(2, 2)
    rep = run_experiment(
        ExperimentConfig(X, 0, 1, ks=(2,), scan_degree=1, s_values=(1, 2), length_predicates=True, trunc_degree=3)
    )
    assert rep.row(2, "length<1").count == rep.row(2, "quasismooth").count
    assert rep.row(2, "length<2").count >= rep.row(2, "length<1").count


def test_experiment_validation():
    with pytest.raises(ValidationError):
        run_experiment(ExperimentConfig(P(2, 2), 1, mode="bogus"))
    with pytest.raises(ValidationError):
        run_experiment(ExperimentConfig(WP((1, 1, 2), 3), 1, length_predicates=True, s_values=(1,)))
