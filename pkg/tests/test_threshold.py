import numpy as np
import pytest

from topoarch.errors import InvalidPolicyError
from topoarch.persistence import (
    PersistenceDiagram,
    ThresholdPolicy,
    lifespan_stats,
    threshold_features,
)
from topoarch.synth import (
    make_cell_spec,
    recommended_eps_max,
    recommended_subsample,
    sample_dataset,
    verify_ground_truth,
)


def diagram(pairs, eps_max=10.0, max_dim=1):
    dims = [p[0] for p in pairs]
    births = [p[1] for p in pairs]
    deaths = [p[2] for p in pairs]
    return PersistenceDiagram(dims, births, deaths, eps_max, max_dim)


def test_lifespan_stats_arithmetic():
    dg = diagram([(0, 0.0, 2.0), (0, 0.0, 4.0)])
    mean, std, spans = lifespan_stats(dg, 0)
    assert mean == pytest.approx(3.0)
    assert std == pytest.approx(1.0)
    assert sorted(spans) == [2.0, 4.0]


def test_lifespan_single_pair_zero_std():
    dg = diagram([(1, 0.5, 2.0)])
    mean, std, _ = lifespan_stats(dg, 1)
    assert mean == pytest.approx(1.5)
    assert std == 0.0


def test_infinite_pairs_use_eps_max():
    dg = diagram([(0, 1.0, np.inf)], eps_max=7.0)
    mean, _, _ = lifespan_stats(dg, 0)
    assert mean == pytest.approx(6.0)


def test_absolute_policy_keeps_only_essentials():
    dg = diagram([(0, 0.0, np.inf), (0, 0.0, np.inf), (0, 0.0, 0.5),
                  (1, 0.2, 0.6)], eps_max=2.0)
    profile = threshold_features(dg, ThresholdPolicy("absolute", eps=5.0))
    assert profile == (2, 0)


def test_absolute_policy_threshold_is_strict():
    dg = diagram([(0, 0.0, np.inf), (1, 0.0, 1.0)], eps_max=2.0)
    assert threshold_features(dg, ThresholdPolicy("absolute", eps=1.0)) == (1, 0)
    assert threshold_features(dg, ThresholdPolicy("absolute", eps=0.99)) == (1, 1)


def test_top_k_policy():
    dg = diagram([(1, 0.0, 3.0), (1, 0.0, 2.0), (1, 0.0, 1.0), (0, 0.0, np.inf)],
                 eps_max=5.0)
    assert threshold_features(dg, ThresholdPolicy("top-k", k=2)) == (1, 2)
    assert threshold_features(dg, ThresholdPolicy("top-k", k=10)) == (1, 3)


@pytest.mark.parametrize("kwargs", [
    {"kind": "absolute", "eps": -0.5},
    {"kind": "absolute"},
    {"kind": "top-k", "k": 0},
    {"kind": "top-k"},
    {"kind": "median"},
])
def test_invalid_policies(kwargs):
    with pytest.raises(InvalidPolicyError):
        ThresholdPolicy(**kwargs)


def test_two_sigma_pooled_cutoff_shared():
    dg = diagram([(0, 0.0, np.inf), (0, 0.0, 0.1), (1, 0.0, 0.05)], eps_max=4.0)
    profile = threshold_features(dg)
    assert profile.cutoffs[0] == profile.cutoffs[1]


def recover(b0, b1, seed):
    spec = make_cell_spec(b0, b1, seed=seed)
    cloud = sample_dataset(spec)
    return verify_ground_truth(
        cloud, recommended_eps_max(spec), subsample=recommended_subsample(spec))


def test_two_disk_sample_recovers_profile():
    # two well-separated disks: two components, no loops
    assert recover(2, 0, seed=101) == (2, 0)


def test_disks_plus_annuli_sample_recovers_profile():
    # two disks + two annuli: four components, two loops
    assert recover(4, 2, seed=202) == (4, 2)
