import numpy as np
import pytest

from topoarch.data import LabeledPointCloud
from topoarch.errors import (
    DimensionMismatchError,
    DivergenceError,
    InvalidArchitectureError,
    InvalidParameterError,
)
from topoarch.mlp import (
    Architecture,
    BatchSchedule,
    MLPModel,
    TrainConfig,
    decide,
    forward,
    init_model,
    load_checkpoint,
    loss_and_grads,
    misclassification,
    save_checkpoint,
    stratified_split,
    train,
)

from oracles import linearly_separable


def test_init_shapes_single_layer():
    model = init_model(Architecture(1, 12), input_dim=2, beta0=2, seed=0)
    assert [w.shape for w in model.weights] == [(2, 12), (12, 2)]
    assert [b.shape for b in model.biases] == [(12,), (2,)]


def test_init_shapes_deep():
    model = init_model(Architecture(3, 8, trunk_width=4), input_dim=2, beta0=4, seed=0)
    assert [w.shape for w in model.weights] == [(2, 8), (8, 4), (4, 4), (4, 2)]


def test_init_variance_scales_with_beta0():
    model = init_model(Architecture(1, 400), input_dim=50, beta0=1, seed=1)
    assert model.weights[0].std() == pytest.approx(1.0, rel=0.05)
    model4 = init_model(Architecture(1, 400), input_dim=50, beta0=4, seed=1)
    assert model4.weights[0].std() == pytest.approx(0.5, rel=0.05)


def test_init_deterministic():
    a = init_model(Architecture(2, 6, trunk_width=3), 2, 3, seed=99)
    b = init_model(Architecture(2, 6, trunk_width=3), 2, 3, seed=99)
    for wa, wb in zip(a.weights, b.weights):
        assert np.array_equal(wa, wb)


@pytest.mark.parametrize("kwargs", [
    {"ell": 0, "h0": 4}, {"ell": 7, "h0": 4}, {"ell": 1, "h0": 0},
    {"ell": 1, "h0": 501}, {"ell": 1, "h0": 4, "trunk_width": 0},
])
def test_architecture_validation(kwargs):
    with pytest.raises(InvalidArchitectureError):
        Architecture(**kwargs)


def test_forward_zero_weights_ties_to_class_zero():
    model = MLPModel([np.zeros((2, 4)), np.zeros((4, 2))], [np.zeros(4), np.zeros(2)])
    pts = np.random.default_rng(0).random((10, 2))
    logits = forward(model, pts)
    assert np.all(logits == 0.0)
    assert np.all(decide(model, pts) == 0)


def test_forward_identity_passthrough():
    model = MLPModel([np.eye(2)], [np.zeros(2)])
    pts = np.array([[0.3, -1.2], [2.0, 0.5]])
    assert np.allclose(forward(model, pts), pts)


def test_forward_dimension_mismatch():
    model = init_model(Architecture(1, 4), 2, 1, seed=0)
    with pytest.raises(DimensionMismatchError):
        forward(model, np.zeros((3, 5)))


@pytest.mark.parametrize("ell", [1, 2, 3, 4])
def test_gradients_match_finite_differences(ell):
    rng = np.random.default_rng(ell)
    arch = Architecture(ell, int(rng.integers(2, 9)),
                        trunk_width=int(rng.integers(2, 6)))
    model = init_model(arch, 3, 2, seed=ell + 10)
    x = rng.random((12, 3))
    y = rng.integers(0, 2, 12)
    _, gw, gb = loss_and_grads(model, x, y)
    h = 1e-5
    for params, grads in ((model.weights, gw), (model.biases, gb)):
        for p, g in zip(params, grads):
            flat = p.ravel()
            for idx in range(0, flat.size, max(1, flat.size // 5)):
                orig = flat[idx]
                flat[idx] = orig + h
                lp, _, _ = loss_and_grads(model, x, y)
                flat[idx] = orig - h
                lm, _, _ = loss_and_grads(model, x, y)
                flat[idx] = orig
                fd = (lp - lm) / (2 * h)
                scale = max(abs(fd), abs(g.ravel()[idx]), 1e-8)
                assert abs(fd - g.ravel()[idx]) / scale < 1e-4


def separable_cloud(n=400, seed=0):
    rng = np.random.default_rng(seed)
    a = rng.random((n // 2, 2)) + np.array([3.0, 0.0])
    b = rng.random((n // 2, 2)) - np.array([3.0, 0.0])
    pts = np.vstack([a, b])
    labels = np.concatenate([np.ones(n // 2, dtype=int), np.zeros(n // 2, dtype=int)])
    return LabeledPointCloud(pts, labels)


def test_train_converges_on_separable_data():
    cloud = separable_cloud()
    assert linearly_separable(cloud.points, cloud.labels)
    model = init_model(Architecture(1, 1), 2, 1, seed=0)
    result = train(model, cloud, TrainConfig(seed=0, max_steps=3000))
    assert result.converged_at is not None
    assert result.best_error <= 0.05


def test_train_requires_both_classes():
    cloud = LabeledPointCloud([[0.0, 0.0], [1.0, 1.0]], [1, 1])
    model = init_model(Architecture(1, 2), 2, 1, seed=0)
    with pytest.raises(InvalidParameterError):
        train(model, cloud, TrainConfig(seed=0, max_steps=10))


def test_train_divergence_detected():
    cloud = separable_cloud(200, seed=1)
    model = init_model(Architecture(2, 8, trunk_width=4), 2, 1, seed=1)
    with pytest.raises(DivergenceError):
        train(model, cloud, TrainConfig(seed=1, max_steps=3000, learning_rate=1e150))


def test_train_deterministic():
    cloud = separable_cloud(300, seed=2)
    model = init_model(Architecture(1, 4), 2, 1, seed=2)
    r1 = train(model, cloud, TrainConfig(seed=7, max_steps=500))
    r2 = train(model, cloud, TrainConfig(seed=7, max_steps=500))
    assert r1.error_curve == r2.error_curve
    assert r1.loss_curve == r2.loss_curve
    for w1, w2 in zip(r1.final_model.weights, r2.final_model.weights):
        assert np.array_equal(w1, w2)


def test_error_curve_bounds_and_convergence_index():
    cloud = separable_cloud(300, seed=3)
    model = init_model(Architecture(1, 3), 2, 1, seed=3)
    result = train(model, cloud, TrainConfig(seed=3, max_steps=1200))
    errs = [e for _, e in result.error_curve]
    assert all(0.0 <= e <= 1.0 for e in errs)
    if result.converged_at is not None:
        qualifying = [s for s, e in result.error_curve if e <= 0.05]
        assert result.converged_at == qualifying[0]


def test_loss_monotone_in_expectation_first_half():
    cloud = separable_cloud(400, seed=4)
    model = init_model(Architecture(1, 6), 2, 1, seed=4)
    result = train(model, cloud, TrainConfig(seed=4, max_steps=2000, patience=2000))
    losses = result.loss_curve[: len(result.loss_curve) // 2]
    window = max(20, len(losses) // 10)
    means = [np.mean(losses[i:i + window]) for i in range(0, len(losses) - window, window)]
    assert all(b <= a * 1.05 for a, b in zip(means, means[1:]))


def test_batch_schedule_growth():
    sched = BatchSchedule(initial=32, growth=2, epochs_per_step=2, max_size=256)
    assert sched.size_at(0, 10_000) == 32
    assert sched.size_at(1, 10_000) == 32
    assert sched.size_at(2, 10_000) == 64
    assert sched.size_at(4, 10_000) == 128
    assert sched.size_at(20, 10_000) == 256
    assert sched.size_at(20, 100) == 100


def test_stratified_split_deterministic_and_stratified():
    labels = np.array([0] * 80 + [1] * 20)
    rng1 = np.random.default_rng(0)
    rng2 = np.random.default_rng(0)
    tr1, ev1 = stratified_split(labels, 0.2, rng1)
    tr2, ev2 = stratified_split(labels, 0.2, rng2)
    assert np.array_equal(tr1, tr2)
    assert np.array_equal(ev1, ev2)
    assert (labels[ev1] == 1).sum() == 4
    assert (labels[ev1] == 0).sum() == 16
    assert len(set(tr1) & set(ev1)) == 0


def test_checkpoint_roundtrip(tmp_path):
    model = init_model(Architecture(3, 5, trunk_width=3), 2, 2, seed=6)
    path = tmp_path / "model.ckpt"
    save_checkpoint(model, path)
    back = load_checkpoint(path)
    assert back.n_layers == model.n_layers
    for w1, w2 in zip(model.weights, back.weights):
        assert np.array_equal(w1, w2)
    for b1, b2 in zip(model.biases, back.biases):
        assert np.array_equal(b1, b2)


def test_checkpoint_bad_magic(tmp_path):
    path = tmp_path / "bad.ckpt"
    path.write_bytes(b"NOPE" + b"\x00" * 32)
    with pytest.raises(InvalidParameterError):
        load_checkpoint(path)


def test_misclassification():
    model = MLPModel([np.eye(2)], [np.zeros(2)])
    pts = np.array([[0.0, 1.0], [1.0, 0.0], [0.0, 2.0]])
    assert misclassification(model, pts, np.array([1, 0, 1])) == 0.0
    assert misclassification(model, pts, np.array([0, 0, 1])) == pytest.approx(1 / 3)
