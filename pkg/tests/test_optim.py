"""
Unit tests for the SGD update, training configuration and training loop.
"""

# local imports
from gradflow.layers.exceptions import LayerUsageError, NumericError
from gradflow.layers.param import ParamTensor
from gradflow.mnist.dataset import Dataset, one_hot
from gradflow.mnist.synthetic import synthetic_dataset
from gradflow.network.architecture import parse_architecture
from gradflow.network.builder import build_from_architecture, build_reference_net
from gradflow.optim.config import DEFAULT_TRAIN_CONFIG, TrainConfig, TrainConfigManager
from gradflow.optim.exceptions import (
    EvaluationError,
    TrainConfigError,
    TrainingError,
)
from gradflow.optim.sgd import sgd_step
from gradflow.optim.trainer import (
    MetricsSink,
    count_correct,
    evaluate,
    fit,
    train_epoch,
)

# 3rd party imports
import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

TINY_ARCHITECTURE = """\
input f=6
classes n=3
fc out=8
relu
fc out=3
"""

TINY_BN_ARCHITECTURE = """\
input f=6
classes n=3
fc out=8
batchnorm
relu
fc out=3
"""


@pytest.fixture
def tiny_data():
    rng = np.random.default_rng(0)
    labels = np.arange(12) % 3
    centers = np.eye(3, 6) * 3.0
    images = centers[labels] + 0.1 * rng.normal(size=(12, 6))
    return Dataset(images, one_hot(labels, 3))


def tiny_net(text: str = TINY_ARCHITECTURE, seed: int = 0):
    return build_from_architecture(parse_architecture(text), seed)


def test_train_config_defaults():
    cfg = TrainConfig()
    assert cfg.to_dict() == DEFAULT_TRAIN_CONFIG
    assert cfg.batch_size == 32
    assert cfg.epochs == 5
    assert "learning_rate=0.01" in str(cfg)


@pytest.mark.parametrize(
    "config",
    [
        {"learning_rate": -0.1},
        {"learning_rate": float("nan")},
        {"learning_rate": "0.1"},
        {"batch_size": 0},
        {"batch_size": 2.0},
        {"epochs": -1},
        {"seed": -1},
        {"shuffle": "yes"},
        {"momentum": 0.9},
    ],
)
def test_train_config_rejects(config):
    assert TrainConfigManager().check_valid_config(config) is not None
    with pytest.raises(TrainConfigError):
        TrainConfig(**config)


def test_zero_learning_rate_is_valid():
    assert TrainConfig(learning_rate=0).learning_rate == 0.0


def test_sgd_step_on_quadratic():
    # f(p) = p^2 / 2 has gradient p, so every step scales p by (1 - lr)
    param = ParamTensor("p", np.array([1.0]))
    for _ in range(10):
        sgd_step([param], [param.value.copy()], 0.1)
    assert param.value[0] == pytest.approx(0.9**10, rel=1e-12)
    assert param.value[0] == pytest.approx(0.34868, abs=1e-5)


def test_sgd_step_uses_stored_gradients():
    param = ParamTensor("w0", np.ones((2, 2)))
    param.set_grad(np.full((2, 2), 2.0))
    sgd_step([param], None, 0.25)
    assert_array_equal(param.value, np.full((2, 2), 0.5))


def test_sgd_step_zero_gradient_keeps_params():
    param = ParamTensor("b0", np.arange(3.0))
    sgd_step([param], [np.zeros(3)], 0.5)
    assert_array_equal(param.value, np.arange(3.0))


def test_sgd_step_non_finite_gradient_aborts_whole_step():
    first = ParamTensor("w1", np.ones(2))
    second = ParamTensor("b1", np.ones(2))
    with pytest.raises(NumericError, match="b1"):
        sgd_step([first, second], [np.ones(2), np.array([1.0, np.inf])], 0.1)
    assert_array_equal(first.value, np.ones(2))
    assert_array_equal(second.value, np.ones(2))


def test_sgd_step_gradient_count_mismatch():
    with pytest.raises(ValueError):
        sgd_step([ParamTensor("w", np.ones(2))], [], 0.1)


def test_sgd_step_then_negated_step_restores_params():
    net = tiny_net(seed=4)
    params = net.collect_params()
    before = [param.value.copy() for param in params]
    grads = [
        np.random.default_rng(i).normal(size=param.shape)
        for i, param in enumerate(params)
    ]
    sgd_step(params, grads, 0.05)
    assert not np.array_equal(params[0].value, before[0])
    sgd_step(params, grads, -0.05)
    for param, value in zip(params, before):
        assert_allclose(param.value, value, rtol=0.0, atol=1e-12)


def test_sgd_step_is_affine_in_learning_rate():
    grad = np.array([0.3, -1.25, 2.0])
    once = ParamTensor("w0", np.array([1.0, 2.0, 3.0]))
    twice = ParamTensor("w0", np.array([1.0, 2.0, 3.0]))
    sgd_step([once], [grad], 0.1)
    sgd_step([twice], [grad], 0.2)
    assert_allclose(once.value - twice.value, 0.1 * grad, rtol=0.0, atol=1e-15)


def test_param_tensor_rejects_shape_mismatch():
    param = ParamTensor("w0", np.ones((2, 3)))
    with pytest.raises(LayerUsageError, match="w0"):
        param.set_value(np.ones((3, 2)))
    with pytest.raises(LayerUsageError, match="Gradient"):
        param.set_grad(np.ones(6))
    assert_array_equal(param.value, np.ones((2, 3)))


def test_count_correct():
    y_pred = np.array([[0.9, 0.1], [0.2, 0.8], [0.6, 0.4]])
    y_gt = np.array([[1.0, 0.0], [1.0, 0.0], [1.0, 0.0]])
    assert count_correct(y_pred, y_gt) == 2


def test_train_epoch_records(tiny_data):
    net = tiny_net()
    sink = MetricsSink()
    cfg = TrainConfig(learning_rate=0.1, batch_size=5, epochs=1)
    records = train_epoch(net, tiny_data, cfg, epoch=3, sink=sink)
    assert len(records) == 3
    assert sink.records == records
    assert [record.batch for record in records] == [0, 1, 2]
    assert all(record.epoch == 3 for record in records)
    assert all(record.loss >= 0.0 for record in records)
    assert all(0.0 <= record.accuracy <= 1.0 for record in records)


def test_train_epoch_zero_learning_rate_keeps_params(tiny_data):
    net = tiny_net()
    before = [param.value.copy() for param in net.collect_params()]
    train_epoch(net, tiny_data, TrainConfig(learning_rate=0.0, batch_size=4))
    for param, value in zip(net.collect_params(), before):
        assert_array_equal(param.value, value)


def test_train_epoch_is_deterministic(tiny_data):
    cfg = TrainConfig(learning_rate=0.1, batch_size=4, seed=11)
    a, b = tiny_net(seed=2), tiny_net(seed=2)
    assert train_epoch(a, tiny_data, cfg) == train_epoch(b, tiny_data, cfg)
    for pa, pb in zip(a.collect_params(), b.collect_params()):
        assert_array_equal(pa.value, pb.value)


def test_train_epoch_batchnorm_rejects_batch_size_one(tiny_data):
    net = tiny_net(TINY_BN_ARCHITECTURE)
    with pytest.raises(TrainConfigError):
        train_epoch(net, tiny_data, TrainConfig(batch_size=1))


def test_train_epoch_batchnorm_drops_single_sample_batch(tiny_data):
    net = tiny_net(TINY_BN_ARCHITECTURE)
    records = train_epoch(net, tiny_data.head(9), TrainConfig(batch_size=4))
    assert len(records) == 2


def test_train_epoch_wraps_layer_failures(tiny_data):
    net = tiny_net()
    wrong = Dataset(np.zeros((4, 5)), one_hot(np.zeros(4, dtype=int), 3))
    with pytest.raises(TrainingError) as info:
        train_epoch(net, wrong, TrainConfig(batch_size=2), epoch=1)
    assert info.value.epoch == 1
    assert info.value.batch == 0
    assert info.value.__cause__ is not None
    assert all(not layer.has_cache for layer in net.layers)


def test_train_epoch_non_finite_gradient(tiny_data):
    net = tiny_net()
    net.layers[0].w.set_value(np.full((6, 8), np.nan))
    with pytest.raises(TrainingError) as info:
        train_epoch(net, tiny_data, TrainConfig(batch_size=4))
    assert isinstance(info.value.__cause__, NumericError)


def test_evaluate(tiny_data):
    net = tiny_net()
    loss, accuracy = evaluate(net, tiny_data, batch_size=5)
    assert loss > 0.0
    assert 0.0 <= accuracy <= 1.0
    assert evaluate(net, tiny_data) == pytest.approx((loss, accuracy), rel=1e-12)


def test_evaluate_empty_dataset():
    empty = Dataset(np.zeros((0, 6)), np.zeros((0, 3)))
    with pytest.raises(EvaluationError):
        evaluate(tiny_net(), empty)


def test_fit_learns_separable_data(tiny_data):
    net = tiny_net()
    epochs_seen = []
    cfg = TrainConfig(learning_rate=0.1, batch_size=4, epochs=30, seed=1)
    summaries = fit(
        net,
        tiny_data,
        cfg,
        test=tiny_data,
        on_epoch_end=lambda epoch, _: epochs_seen.append(epoch),
    )
    assert epochs_seen == list(range(30))
    assert len(summaries) == 30
    assert summaries[-1].mean_loss < summaries[0].mean_loss
    assert summaries[-1].test_accuracy == 1.0
    assert summaries[-1].test_loss is not None


def test_fit_without_test_data(tiny_data):
    summaries = fit(tiny_net(), tiny_data, TrainConfig(batch_size=6, epochs=2))
    assert [summary.epoch for summary in summaries] == [0, 1]
    assert summaries[0].test_loss is None
    assert summaries[0].test_accuracy is None


@pytest.mark.slow
def test_reference_net_overfits_single_batch():
    net = build_reference_net(seed=0)
    data = synthetic_dataset(seed=0).head(8)
    cfg = TrainConfig(learning_rate=0.05, batch_size=8, shuffle=False)
    records = []
    for epoch in range(200):
        records += train_epoch(net, data, cfg, epoch)
    assert len(records) == 200
    assert records[-1].loss < 0.01
