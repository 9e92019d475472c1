import numpy as np
import pytest

from topoarch.data import PointCloud
from topoarch.errors import (
    BudgetExceededError,
    DimensionMismatchError,
    InvalidParameterError,
    MalformedComplexError,
)
from topoarch.rips import FilteredComplex, Simplex, build_rips, facet_csr

from oracles import rips_simplices_at, simplex_diameter


def equilateral(side=1.0):
    return np.array([[0.0, 0.0], [side, 0.0], [side / 2, side * np.sqrt(3) / 2]])


def test_equilateral_triangle_counts():
    cx = build_rips(PointCloud(equilateral()), eps_max=2.0, max_dim=2)
    counts = cx.counts_by_dim()
    assert list(counts) == [3, 3, 1]
    values = {tuple(s.vertices): s.filtration_value for s in cx}
    assert values[(0,)] == 0.0
    for verts, v in values.items():
        if len(verts) >= 2:
            assert v == pytest.approx(1.0, abs=1e-12)


def test_two_far_points_no_edge():
    cx = build_rips(PointCloud([[0.0, 0.0], [5.0, 0.0]]), eps_max=1.0, max_dim=2)
    assert list(cx.counts_by_dim()) == [2, 0, 0]
    assert cx.max_dimension == 2


def test_matches_exhaustive_enumeration():
    rng = np.random.default_rng(1234)
    pts = rng.random((10, 2))
    eps = np.sqrt(2.0)
    cx = build_rips(PointCloud(pts), eps_max=eps, max_dim=2)
    expected = rips_simplices_at(pts, eps, 2)
    got = {0: [], 1: [], 2: []}
    for s in cx:
        got[s.dimension].append(tuple(s.vertices))
    for d in range(3):
        assert sorted(got[d]) == sorted(expected[d])
    for s in cx:
        assert s.filtration_value == pytest.approx(
            simplex_diameter(pts, tuple(s.vertices)), abs=1e-9)


def test_budget_exceeded_reports_count():
    rng = np.random.default_rng(0)
    pts = rng.random((30, 2))
    with pytest.raises(BudgetExceededError) as exc:
        build_rips(PointCloud(pts), eps_max=2.0, max_dim=2, budget=100)
    assert exc.value.context["count"] > 100
    assert exc.value.context["budget"] == 100


def test_ragged_input_rejected():
    with pytest.raises(DimensionMismatchError):
        build_rips([[0.0, 0.0], [1.0]], eps_max=1.0)


@pytest.mark.parametrize("eps,max_dim", [(0.0, 2), (-1.0, 2), (1.0, 0), (1.0, 4)])
def test_parameter_validation(eps, max_dim):
    with pytest.raises(InvalidParameterError):
        build_rips(PointCloud([[0.0, 0.0], [1.0, 0.0]]), eps_max=eps, max_dim=max_dim)


def test_face_monotonicity_and_order():
    rng = np.random.default_rng(7)
    for trial in range(5):
        pts = rng.random((12, 2)) * 2
        cx = build_rips(PointCloud(pts), eps_max=1.0, max_dim=2)
        indptr, facets = facet_csr(cx)
        for j in range(len(cx)):
            for fi in facets[indptr[j]:indptr[j + 1]]:
                assert fi < j
                assert cx.values[fi] <= cx.values[j] + 1e-12
        keys = list(zip(cx.values, cx.dims,
                        [tuple(r) for r in cx.padded_vertices.tolist()]))
        assert keys == sorted(keys)


def test_simplex_validation():
    with pytest.raises(InvalidParameterError):
        Simplex((2, 1), 0.5)
    with pytest.raises(InvalidParameterError):
        Simplex((0, 1), -0.5)
    s = Simplex((0, 2, 5), 1.5)
    assert s.dimension == 2
    assert (0, 2) in s.faces()


def test_missing_face_detected():
    cx = FilteredComplex.from_simplices(
        [((0,), 0.0), ((1,), 0.0), ((2,), 0.0), ((0, 1), 1.0), ((0, 2), 1.0),
         ((0, 1, 2), 1.0)],
        sort=False,
    )
    with pytest.raises(MalformedComplexError):
        facet_csr(cx)


def test_out_of_order_detected():
    cx = FilteredComplex.from_simplices(
        [((0,), 0.0), ((1,), 0.0), ((0, 1), 0.5)], sort=False)
    bad = FilteredComplex(
        cx.padded_vertices[[2, 0, 1]], cx.dims[[2, 0, 1]], cx.values[[2, 0, 1]],
        n_points=2, max_dimension=1, eps_max=1.0)
    with pytest.raises(MalformedComplexError):
        bad.validate()
