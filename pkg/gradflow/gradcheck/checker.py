"""
Finite-difference oracle for the analytic backward rules.

Every check perturbs one coordinate at a time by +/- h, evaluates a scalar
loss with forward passes only and compares the central difference with the
gradient produced by the backward rules.

Notes
-----
- Layer checks use the squared loss 1/2 * sum((output - target)^2) with a
  fixed random target, so the upstream error is nontrivial.
- Network checks use the minibatch cross-entropy L_batch.
- Non-differentiable coordinates are excluded: ReLU inputs with
  |x| < 1e-3, maxpool inputs in patches whose two largest values differ by
  less than 1e-3 and, for whole networks, perturbations that flip a ReLU mask or a
  maxpool selection.
"""

# standard library imports
import logging
from typing import Callable, NamedTuple

# current package imports
from .exceptions import GradCheckError
from .report import GradCheckReport, compare_gradients

# local imports
from gradflow.geometry.sampling import SamplingTriplet
from gradflow.geometry.windows import enumerate_patches, pad
from gradflow.layers.activation import (
    ReLU,
    cross_entropy_loss,
    softmax_ce_backward,
    softmax_forward,
)
from gradflow.layers.batchnorm import BatchNorm
from gradflow.layers.conv import Convolution
from gradflow.layers.dense import FullyConnected
from gradflow.layers.exceptions import NumericError
from gradflow.layers.flatten import Flatten
from gradflow.layers.layer import TRAIN, Layer
from gradflow.layers.pooling import MaxPool
from gradflow.mnist.dataset import one_hot
from gradflow.network.architecture import parse_architecture
from gradflow.network.builder import build_from_architecture
from gradflow.network.network import Network
from gradflow.utils.seeding import make_rng

# 3rd party imports
import numpy as np

DEFAULT_H = 1e-5
DEFAULT_TOLERANCE = 1e-6
KINK_THRESHOLD = 1e-3
MAX_LAYER_COORDINATES = 500
MAX_NETWORK_PARAMS = 1000
LAYER_KINDS = (
    "fc",
    "relu",
    "maxpool",
    "flatten",
    "conv",
    "batchnorm",
    "softmax_ce",
    "shortcut",
)

MINI_CONV_ARCHITECTURE = """\
input d=1 r=8
classes n=10
conv out=2 k=3 s=1 p=0
relu
maxpool k=2 s=2 p=0
flatten
fc out=10
"""

MINI_SHORTCUT_ARCHITECTURE = """\
input f=6
classes n=4
fc out=6
relu
batchnorm
fc out=6
relu
fc out=4
shortcut from=0 to=5
"""


class GradientCase(NamedTuple):
    """
    A differentiable instance: the arrays to perturb (in place), the scalar
    loss over them, the analytic gradients and the coordinates to skip.
    'signature' optionally reports the active branch of every kink so perturbations
    that cross one can be discarded.
    """

    arrays: dict[str, np.ndarray]
    loss: Callable[[], float]
    analytic: Callable[[], dict[str, np.ndarray]]
    excluded: dict[str, np.ndarray]
    signature: Callable[[], list[np.ndarray]] | None = None


def central_difference(
    fn: Callable[[np.ndarray], float],
    params: np.ndarray,
    coordinate: tuple[int, ...] | int,
    h: float = DEFAULT_H,
) -> float:
    """
    Central difference (fn(p + h e) - fn(p - h e)) / 2h along one coordinate.
    'params' is perturbed in place and restored bit-exactly.

    Raises
    ------
    GradCheckError
        If h is not positive.
    NumericError
        If either evaluation is non-finite.
    """
    if not h > 0:
        msg = f"Finite-difference step must be positive, got {h}."
        logging.error(msg)
        raise GradCheckError(msg)
    if isinstance(coordinate, (int, np.integer)):
        coordinate = np.unravel_index(int(coordinate), params.shape)
    old = params[coordinate]
    params[coordinate] = old + h
    f_plus = fn(params)
    params[coordinate] = old - h
    f_minus = fn(params)
    params[coordinate] = old
    if not (np.isfinite(f_plus) and np.isfinite(f_minus)):
        msg = f"Non-finite loss while probing coordinate {tuple(coordinate)}."
        logging.error(msg)
        raise NumericError(msg)
    return (f_plus - f_minus) / (2.0 * h)


def _same_signature(a: list[np.ndarray], b: list[np.ndarray]) -> bool:
    return len(a) == len(b) and all(np.array_equal(x, y) for x, y in zip(a, b))


def numeric_gradients(
    case: GradientCase, h: float
) -> tuple[dict[str, np.ndarray], dict[str, np.ndarray]]:
    """
    Central differences of case.loss for every non-excluded coordinate.

    Returns
    -------
    tuple[dict[str, np.ndarray], dict[str, np.ndarray]]
        Numeric gradients and the exclusion masks, extended by the perturbations
        that changed the kink signature.
    """
    baseline = None
    if case.signature is not None:
        case.loss()
        baseline = case.signature()

    numeric = {}
    excluded = {}
    for name, array in case.arrays.items():
        mask = np.array(case.excluded.get(name, np.zeros(array.shape, dtype=bool)))
        grad = np.zeros(array.shape)
        for idx in np.ndindex(array.shape):
            if mask[idx]:
                continue
            crossed = []

            def fn(_, crossed=crossed):
                value = case.loss()
                if baseline is not None:
                    if not _same_signature(case.signature(), baseline):
                        crossed.append(True)
                return value

            grad[idx] = central_difference(fn, array, idx, h)
            if crossed:
                mask[idx] = True
                grad[idx] = 0.0
        numeric[name] = grad
        excluded[name] = mask
    return numeric, excluded


def run_case(
    target: str,
    case: GradientCase,
    tolerance: float = DEFAULT_TOLERANCE,
    h: float = DEFAULT_H,
    h_grid: list[float] = None,
) -> GradCheckReport:
    """
    Compares analytic and numeric gradients of 'case'. With 'h_grid' every
    step size is tried and the report with the smallest maximum relative error
    is kept.
    """
    analytic = case.analytic()
    reports = []
    for step in h_grid or [h]:
        numeric, excluded = numeric_gradients(case, step)
        reports.append(
            compare_gradients(target, analytic, numeric, tolerance, step, excluded)
        )
    best = min(reports, key=lambda report: report.max_rel_error)
    logging.info(str(best))
    return best


def _forward_only(layer: Layer, a: np.ndarray) -> np.ndarray:
    out = layer.forward(a, TRAIN)
    layer.clear_cache()
    return out


def _squared_loss(out: np.ndarray, target: np.ndarray) -> float:
    return 0.5 * float(np.sum((out - target) ** 2))


def _layer_case(
    layer: Layer,
    a: np.ndarray,
    rng: np.random.Generator,
    excluded: dict[str, np.ndarray] = None,
) -> GradientCase:
    target = rng.normal(size=_forward_only(layer, a).shape)
    arrays = {"a": a}
    for param in layer.params:
        arrays[param.name] = param.value

    def loss() -> float:
        return _squared_loss(_forward_only(layer, a), target)

    def analytic() -> dict[str, np.ndarray]:
        out = layer.forward(a, TRAIN)
        grads = {"a": layer.backward(out - target)}
        for param in layer.params:
            grads[param.name] = param.grad.copy()
        return grads

    return GradientCase(arrays, loss, analytic, excluded or {})


def maxpool_kinks(a: np.ndarray, p: SamplingTriplet) -> np.ndarray:
    """
    Marks every input cell of a patch whose two largest values differ by less
    than KINK_THRESHOLD (the selected maximum is unstable there).
    """
    n, d, r, _ = a.shape
    padded = pad(a, p.p)
    mask = np.zeros(padded.shape, dtype=bool)
    for row, col in enumerate_patches(r, p):
        patch = padded[:, :, row : row + p.k, col : col + p.k].reshape(n, d, -1)
        if patch.shape[-1] < 2:
            continue
        top_two = np.sort(patch, axis=-1)[..., -2:]
        unstable = (top_two[..., 1] - top_two[..., 0]) < KINK_THRESHOLD
        mask[:, :, row : row + p.k, col : col + p.k] |= unstable[..., None, None]
    return mask[:, :, p.p : p.p + r, p.p : p.p + r]


def _fc_case(rng):
    layer = FullyConnected(rng.normal(size=(4, 3)), rng.normal(size=3))
    return _layer_case(layer, rng.normal(size=(2, 4)), rng)


def _relu_case(rng):
    a = rng.normal(size=(2, 2, 3, 3))
    a.flat[0] = 0.0
    return _layer_case(ReLU(), a, rng, {"a": np.abs(a) < KINK_THRESHOLD})


def _maxpool_case(rng):
    sampling = SamplingTriplet(k=3, s=2, p=1)
    a = rng.normal(size=(2, 2, 5, 5))
    return _layer_case(MaxPool(sampling), a, rng, {"a": maxpool_kinks(a, sampling)})


def _flatten_case(rng):
    return _layer_case(Flatten(), rng.normal(size=(2, 2, 3, 3)), rng)


def _conv_case(rng):
    layer = Convolution(
        0.5 * rng.normal(size=(3, 2, 3, 3)),
        rng.normal(size=3),
        SamplingTriplet(k=3, s=2, p=0),
    )
    return _layer_case(layer, rng.normal(size=(2, 2, 6, 6)), rng)


def _batchnorm_case(rng):
    layer = BatchNorm(4)
    layer.w.set_value(rng.uniform(0.5, 1.5, size=4))
    layer.b.set_value(rng.normal(size=4))
    return _layer_case(layer, rng.normal(size=(7, 4)), rng)


def _softmax_ce_case(rng):
    logits = rng.normal(size=(3, 5))
    y_gt = one_hot(rng.integers(5, size=3), 5)

    def loss() -> float:
        return cross_entropy_loss(softmax_forward(logits), y_gt)[1]

    def analytic() -> dict[str, np.ndarray]:
        return {"a": softmax_ce_backward(softmax_forward(logits), y_gt)}

    return GradientCase({"a": logits}, loss, analytic, {})


def _shortcut_case(rng):
    arch = parse_architecture(
        "input f=4\nclasses n=4\nfc out=4\nrelu\nfc out=4\nshortcut from=0 to=3\n"
    )
    net = build_from_architecture(arch, seed=int(rng.integers(2**31)))
    a0 = rng.normal(size=(3, 4))
    target = rng.normal(size=(3, 4))
    arrays = {"a": a0}
    for param in net.collect_params():
        arrays[param.name] = param.value

    def loss() -> float:
        logits, _ = net.forward(a0, TRAIN)
        return _squared_loss(logits, target)

    def analytic() -> dict[str, np.ndarray]:
        logits, _ = net.forward(a0, TRAIN)
        grads = {"a": net.backward_from(logits - target)}
        for param in net.collect_params():
            grads[param.name] = param.grad.copy()
        return grads

    return GradientCase(arrays, loss, analytic, {}, lambda: kink_signature(net))


_CASES = {
    "fc": _fc_case,
    "relu": _relu_case,
    "maxpool": _maxpool_case,
    "flatten": _flatten_case,
    "conv": _conv_case,
    "batchnorm": _batchnorm_case,
    "softmax_ce": _softmax_ce_case,
    "shortcut": _shortcut_case,
}


def build_layer_case(kind: str, seed: int = 0) -> GradientCase:
    """
    Returns the small random instance used to check layer kind 'kind'.

    Raises
    ------
    GradCheckError
        If 'kind' is unknown or the instance is too large.
    """
    if kind not in _CASES:
        msg = f"Unknown layer kind '{kind}'. Valid options: {list(LAYER_KINDS)}"
        logging.error(msg)
        raise GradCheckError(msg)
    case = _CASES[kind](make_rng(seed))
    size = sum(array.size for array in case.arrays.values())
    if size > MAX_LAYER_COORDINATES:
        msg = f"Gradient check of '{kind}' spans {size} coordinates."
        logging.error(msg)
        raise GradCheckError(msg)
    return case


def check_layer(
    kind: str,
    seed: int = 0,
    tolerance: float = DEFAULT_TOLERANCE,
    h: float = DEFAULT_H,
    h_grid: list[float] = None,
) -> GradCheckReport:
    """
    Checks the input gradient and every parameter gradient of one layer kind
    against central differences.

    Parameters
    ----------
    kind: str
        One of LAYER_KINDS.
    seed: int
        Seed of the random instance.
    tolerance: float
    h: float
    h_grid: list[float]
        Optional step sizes to sweep; the best is reported.

    Returns
    -------
    GradCheckReport
    """
    return run_case(kind, build_layer_case(kind, seed), tolerance, h, h_grid)


def kink_signature(net: Network) -> list[np.ndarray]:
    """
    Active ReLU masks and maxpool selections of the last train-mode forward.
    """
    signature = []
    for layer in net.layers:
        if not layer.has_cache:
            continue
        if isinstance(layer, ReLU):
            signature.append(layer.cache >= 0.0)
        elif isinstance(layer, MaxPool):
            signature.append(layer.cache.argmax)
    return signature


def check_network(
    net: Network,
    n: int = 3,
    seed: int = 0,
    tolerance: float = DEFAULT_TOLERANCE,
    h: float = DEFAULT_H,
    h_grid: list[float] = None,
    target: str = "network",
) -> GradCheckReport:
    """
    Checks every parameter gradient of 'net' against central differences of
    the minibatch cross-entropy on a random batch of 'n' samples.

    Batch norm running statistics are restored afterwards.

    Raises
    ------
    GradCheckError
        If the network has more than MAX_NETWORK_PARAMS parameters.
    """
    if net.num_params > MAX_NETWORK_PARAMS:
        msg = (
            f"Network gradient checks are limited to {MAX_NETWORK_PARAMS} "
            f"parameters, got {net.num_params}."
        )
        logging.error(msg)
        raise GradCheckError(msg)
    rng = make_rng(seed)
    a0 = rng.normal(size=(n,) + net.input_shape)
    y_gt = one_hot(rng.integers(net.n_classes, size=n), net.n_classes)
    params = net.collect_params()
    saved_state = {name: t.copy() for name, t in net.state_tensors().items()}

    def loss() -> float:
        logits, _ = net.forward(a0, TRAIN)
        return cross_entropy_loss(softmax_forward(logits), y_gt)[1]

    def analytic() -> dict[str, np.ndarray]:
        logits, _ = net.forward(a0, TRAIN)
        net.backward(softmax_forward(logits), y_gt)
        return {param.name: param.grad.copy() for param in params}

    case = GradientCase(
        {param.name: param.value for param in params},
        loss,
        analytic,
        {},
        lambda: kink_signature(net),
    )
    try:
        return run_case(target, case, tolerance, h, h_grid)
    finally:
        net.clear_caches()
        for name, value in saved_state.items():
            net.load_state_tensor(name, value)


def mini_conv_net(seed: int = 0) -> Network:
    """conv 2@3x3, ReLU, maxpool 2/2, flatten, FC 10 on 1 x 8 x 8 inputs."""
    return build_from_architecture(parse_architecture(MINI_CONV_ARCHITECTURE), seed)


def mini_shortcut_net(seed: int = 0) -> Network:
    """Two FC + ReLU layers (with a batch norm) bypassed by a shortcut, then FC 4."""
    return build_from_architecture(
        parse_architecture(MINI_SHORTCUT_ARCHITECTURE), seed
    )


def run_checks(
    layers: list[str] = None,
    seed: int = 0,
    tolerance: float = DEFAULT_TOLERANCE,
    h: float = DEFAULT_H,
    h_grid: list[float] = None,
) -> list[GradCheckReport]:
    """
    Runs the layer checks for 'layers' (every kind if None) and, when 'layers'
    is None or holds 'network', both miniature network checks.
    """
    selected = list(LAYER_KINDS) if layers is None else list(layers)
    reports = []
    for kind in selected:
        if kind == "network":
            continue
        reports.append(check_layer(kind, seed, tolerance, h, h_grid))
    if layers is None or "network" in layers:
        nets = (
            ("network:mini_conv", mini_conv_net),
            ("network:mini_shortcut", mini_shortcut_net),
        )
        for target, build in nets:
            reports.append(
                check_network(build(seed), 3, seed, tolerance, h, h_grid, target)
            )
    return reports


def conv_backward_naive(
    delta: np.ndarray, a: np.ndarray, w: np.ndarray, p: SamplingTriplet
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Brute-force convolution backward: every output cell scatters its error
    into the padded input patch it was computed from and accumulates
    error x patch into the kernel gradient.

    Returns
    -------
    tuple[np.ndarray, np.ndarray, np.ndarray]
        delta_in, dW and dB.
    """
    n, _, r, _ = a.shape
    r_out = delta.shape[2]
    padded = pad(a, p.p)
    d_padded = np.zeros(padded.shape)
    d_w = np.zeros(w.shape)
    for q, (row, col) in enumerate(enumerate_patches(r, p)):
        o_i, o_j = divmod(q, r_out)
        for s in range(n):
            err = delta[s, :, o_i, o_j]
            patch = padded[s, :, row : row + p.k, col : col + p.k]
            d_w += err[:, None, None, None] * patch[None]
            d_padded[s, :, row : row + p.k, col : col + p.k] += np.tensordot(
                err, w, axes=(0, 0)
            )
    d_b = np.sum(delta, axis=(0, 2, 3))
    return d_padded[:, :, p.p : p.p + r, p.p : p.p + r], d_w, d_b
