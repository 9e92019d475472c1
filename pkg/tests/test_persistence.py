import json

import numpy as np
import pytest

from topoarch.data import PointCloud
from topoarch.errors import EmptyDimensionError, MalformedComplexError
from topoarch.persistence import (
    BettiProfile,
    PersistenceDiagram,
    betti_at,
    compute_persistence,
    lifespan_stats,
)
from topoarch.rips import FilteredComplex, build_rips

from oracles import betti_numbers_at, count_components

SQRT2 = np.sqrt(2.0)


def unit_square_diagram():
    pts = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
    cx = build_rips(PointCloud(pts), eps_max=2.0, max_dim=2)
    return compute_persistence(cx)


def test_unit_square_pairing():
    dg = unit_square_diagram()
    h1 = dg.pairs(dim=1)
    assert len(h1) == 1
    assert h1[0][1] == pytest.approx(1.0)
    assert h1[0][2] == pytest.approx(SQRT2)
    h0 = dg.pairs(dim=0)
    finite = [p for p in h0 if np.isfinite(p[2])]
    infinite = [p for p in h0 if not np.isfinite(p[2])]
    assert len(infinite) == 1
    assert len(finite) == 3
    assert all(p[2] == pytest.approx(1.0) for p in finite)
    assert betti_at(dg, 1.2, 1) == 1
    assert betti_at(dg, 0.0, 0) == 4


def test_single_point():
    cx = build_rips(PointCloud([[3.0, 4.0]]), eps_max=1.0, max_dim=2)
    dg = compute_persistence(cx)
    assert dg.pairs(include_zero=True) == [(0, 0.0, np.inf)]


def test_two_clusters_essential_count():
    rng = np.random.default_rng(42)
    a = rng.random((5, 2)) * 0.05
    b = rng.random((5, 2)) * 0.05 + 20.0
    pts = np.vstack([a, b])
    cx = build_rips(PointCloud(pts), eps_max=1.0, max_dim=2)
    dg = compute_persistence(cx)
    assert dg.n_essential(0) == 2
    assert dg.n_essential(0) == count_components(pts, 1.0)


@pytest.mark.parametrize("seed,d", [(0, 2), (1, 2), (2, 3), (3, 3)])
def test_oracle_equivalence_small_clouds(seed, d):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(5, 13))
    pts = rng.random((n, d)) * 2
    max_dim = 2
    eps_max = 1.5
    cx = build_rips(PointCloud(pts), eps_max=eps_max, max_dim=max_dim)
    dg = compute_persistence(cx)
    for eps in np.linspace(0.05, eps_max, 7):
        expected = betti_numbers_at(pts, eps, max_dim - 1)
        got = [betti_at(dg, eps, p) for p in range(max_dim)]
        assert got == expected, f"eps={eps}"


def test_euler_characteristic_bookkeeping():
    rng = np.random.default_rng(11)
    for _ in range(4):
        pts = rng.random((14, 2)) * 1.5
        cx = build_rips(PointCloud(pts), eps_max=0.9, max_dim=2)
        dg = compute_persistence(cx)
        chi_simplices = cx.euler_characteristic()
        chi_betti = sum(
            (-1) ** p * dg.n_essential(p) for p in range(cx.max_dimension + 1))
        assert chi_simplices == chi_betti


def test_rigid_motion_invariance():
    rng = np.random.default_rng(3)
    pts = rng.random((20, 2))
    theta = 0.7
    rot = np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]])
    moved = pts @ rot.T + np.array([5.0, -2.0])
    d1 = compute_persistence(build_rips(PointCloud(pts), eps_max=0.8, max_dim=2))
    d2 = compute_persistence(build_rips(PointCloud(moved), eps_max=0.8, max_dim=2))
    assert len(d1) == len(d2)
    for a, b in zip(d1.pairs(include_zero=True), d2.pairs(include_zero=True)):
        assert a[0] == b[0]
        assert a[1] == pytest.approx(b[1], abs=1e-9)
        if np.isfinite(a[2]) or np.isfinite(b[2]):
            assert a[2] == pytest.approx(b[2], abs=1e-9)


def test_scaling_equivariance():
    from topoarch.persistence import threshold_features
    rng = np.random.default_rng(4)
    pts = rng.random((25, 2))
    s = 3.7
    d1 = compute_persistence(build_rips(PointCloud(pts), eps_max=0.8, max_dim=2))
    d2 = compute_persistence(build_rips(PointCloud(pts * s), eps_max=0.8 * s, max_dim=2))
    assert len(d1) == len(d2)
    for a, b in zip(d1.pairs(include_zero=True), d2.pairs(include_zero=True)):
        assert a[0] == b[0]
        assert b[1] == pytest.approx(s * a[1], rel=1e-9, abs=1e-9)
        if np.isfinite(a[2]):
            assert b[2] == pytest.approx(s * a[2], rel=1e-9, abs=1e-9)
    assert threshold_features(d1) == threshold_features(d2)


def test_beta0_monotone_in_eps():
    rng = np.random.default_rng(5)
    pts = rng.random((18, 2))
    dg = compute_persistence(build_rips(PointCloud(pts), eps_max=1.2, max_dim=2))
    values = [betti_at(dg, e, 0) for e in np.linspace(0, 1.2, 25)]
    assert all(a >= b for a, b in zip(values, values[1:]))


def test_betti_at_small_scale_counts_points():
    rng = np.random.default_rng(19)
    pts = rng.random((19, 2)) * 50
    dmin = min(np.linalg.norm(pts[i] - pts[j])
               for i in range(19) for j in range(i + 1, 19))
    eps = dmin / 2.001
    dg = compute_persistence(build_rips(PointCloud(pts), eps_max=60.0, max_dim=2))
    assert betti_at(dg, eps, 0) == 19
    assert betti_at(dg, eps, 1) == 0


def test_zero_length_pairs_stored_not_queried():
    pts = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, np.sqrt(3) / 2]])
    dg = compute_persistence(build_rips(PointCloud(pts), eps_max=2.0, max_dim=2))
    allp = dg.pairs(include_zero=True)
    defaults = dg.pairs()
    assert len(allp) > len(defaults)
    zero = [p for p in allp if p[1] == p[2]]
    assert len(zero) >= 1
    assert all(p[1] < p[2] for p in defaults)


def test_lifespan_stats_requires_features():
    dg = unit_square_diagram()
    mean, std, spans = lifespan_stats(dg, 1)
    assert mean == pytest.approx(SQRT2 - 1.0)
    assert std == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(EmptyDimensionError):
        lifespan_stats(dg, 3)


def test_diagram_json_roundtrip():
    dg = unit_square_diagram()
    obj = json.loads(dg.to_json())
    assert any(p["death"] is None for p in obj["pairs"])
    back = PersistenceDiagram.from_json(dg.to_json())
    assert back.pairs(include_zero=True) == dg.pairs(include_zero=True)
    assert back.eps_max == dg.eps_max


def test_compute_rejects_malformed():
    cx = FilteredComplex.from_simplices(
        [((0,), 0.0), ((1,), 0.0), ((2,), 0.0), ((0, 1), 1.0), ((0, 1, 2), 1.0)],
        sort=False)
    with pytest.raises(MalformedComplexError):
        compute_persistence(cx)


def test_betti_profile_semantics():
    assert BettiProfile((2, 0)) == BettiProfile((2,))
    assert BettiProfile((2, 1)) != BettiProfile((2, 0))
    assert BettiProfile((3,))[1] == 0
    assert BettiProfile((1, 2, 0)).as_tuple() == (1, 2, 0)
    with pytest.raises(ValueError):
        BettiProfile((-1,))
