"""
Builds networks from architecture descriptions.
"""

# standard library imports
import logging

# current package imports
from .architecture import Architecture, reference_architecture
from .exceptions import ArchitectureError, NetworkShapeError
from .init import init_conv, init_fc
from .network import Network

# local imports
from gradflow.geometry.exceptions import GeometryError
from gradflow.geometry.sampling import SamplingTriplet
from gradflow.geometry.windows import out_resolution
from gradflow.layers.activation import ReLU
from gradflow.layers.batchnorm import BatchNorm
from gradflow.layers.conv import Convolution
from gradflow.layers.dense import FullyConnected
from gradflow.layers.flatten import Flatten
from gradflow.layers.layer import Layer
from gradflow.layers.pooling import MaxPool
from gradflow.utils.seeding import make_rng


def _sliding_output(
    index: int, kind: str, shape: tuple[int, ...], sampling: SamplingTriplet
) -> int:
    if len(shape) != 3:
        _raise(f"Layer {index} ({kind}) needs image input, got shape {shape}.")
    r = shape[1]
    try:
        r_out = out_resolution(r, sampling)
    except GeometryError as e:
        raise ArchitectureError(f"Layer {index} ({kind}): {e}") from e
    if not sampling.is_exact_fit(r):
        _raise(
            f"Layer {index} ({kind}): sampling {sampling} does not tile an input "
            f"of resolution {r} exactly."
        )
    return r_out


def build_layer(
    index: int, entry: dict, shape: tuple[int, ...], rng
) -> tuple[Layer, tuple[int, ...]]:
    """
    Instantiates the layer described by 'entry' for per-sample input 'shape'.

    Returns
    -------
    tuple[Layer, tuple[int, ...]]
        The layer and its per-sample output shape.
    """
    kind = entry["kind"]
    if kind == "conv":
        sampling = SamplingTriplet(entry["k"], entry["s"], entry["p"])
        r_out = _sliding_output(index, kind, shape, sampling)
        w, b = init_conv(rng, entry["out"], shape[0], entry["k"])
        return Convolution(w, b, sampling, index), (entry["out"], r_out, r_out)
    if kind == "maxpool":
        sampling = SamplingTriplet(entry["k"], entry["s"], entry["p"])
        r_out = _sliding_output(index, kind, shape, sampling)
        return MaxPool(sampling, index), (shape[0], r_out, r_out)
    if kind == "relu":
        return ReLU(index), shape
    if kind == "batchnorm":
        layer = BatchNorm(shape[0], entry["momentum"], entry["eps"], index)
        return layer, shape
    if kind == "flatten":
        if len(shape) != 3:
            _raise(f"Layer {index} (flatten) needs image input, got shape {shape}.")
        d, r_h, r_w = shape
        return Flatten(index), (d * r_h * r_w,)
    if kind == "fc":
        if len(shape) != 1:
            _raise(f"Layer {index} (fc) needs flat input, got shape {shape}.")
        w, b = init_fc(rng, shape[0], entry["out"])
        return FullyConnected(w, b, index), (entry["out"],)
    _raise(f"Layer {index}: unknown layer kind '{kind}'.")


def build_from_architecture(arch: Architecture, seed: int = 0) -> Network:
    """
    Instantiates every layer of 'arch' with freshly initialized parameters.

    Parameters
    ----------
    arch: Architecture
    seed: int
        Seed of the initialization draws; layers draw in order.

    Raises
    ------
    ArchitectureError
        If a layer cannot accept the shape produced by its predecessor or a
        sliding window does not tile its input exactly.
    """
    rng = make_rng(seed)
    shape = arch.input_shape
    layers = []
    for index, entry in enumerate(arch.layers):
        layer, shape = build_layer(index, entry, shape, rng)
        layers.append(layer)
    try:
        net = Network(layers, arch.input_shape, arch.n_classes, arch.shortcuts)
    except NetworkShapeError as e:
        raise ArchitectureError(str(e)) from e
    logging.debug(
        "Built network with {} layers and {} parameters.".format(
            len(net), net.num_params
        )
    )
    return net


def build_reference_net(seed: int = 0) -> Network:
    """
    Builds the 16-layer reference classifier for 1 x 28 x 28 inputs:
    conv 6@5x5, ReLU, BN, maxpool 2/2, conv 16@5x5, ReLU, BN, maxpool 2/2,
    flatten, FC 120, ReLU, BN, FC 84, ReLU, BN, FC 10.
    """
    return build_from_architecture(reference_architecture(), seed)


def _raise(msg: str) -> None:
    logging.error(msg)
    raise ArchitectureError(msg)
