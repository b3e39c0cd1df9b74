"""
Feedforward composition of layers: Y_pred = softmax(N_P(A0)).

The forward pass applies the layers in order (adding shortcut activations
where an edge ends); the backward pass seeds Delta = Y_pred - Y_gt at the
embedding and walks the layers in reverse, each backward rule producing the
error of its input and the gradients of its parameters.
"""

# standard library imports
import logging

# current package imports
from .exceptions import NetworkError, NetworkShapeError

# local imports
from gradflow.geometry.exceptions import GeometryError
from gradflow.layers.activation import softmax_ce_backward, softmax_forward
from gradflow.layers.exceptions import LayerUsageError
from gradflow.layers.layer import TRAIN, Layer, assert_valid_mode
from gradflow.layers.param import ParamTensor
from gradflow.layers.shortcut import shortcut_add, shortcut_backward
from gradflow.tensor.exceptions import TensorError

# 3rd party imports
import numpy as np


def format_shape(shape: tuple[int, ...], batch: str = "n") -> str:
    """
    Formats a per-sample shape with the minibatch symbol in front, e.g.
    (16, 4, 4) -> 'n×16×4×4'.
    """
    return "×".join([batch] + [str(dim) for dim in shape])


class Network:
    """
    An ordered stack of layers with optional identity shortcut edges.

    Attributes
    ----------
    layers : list[Layer]
        Layer i maps activation A_i to A_{i+1}.
    input_shape : tuple[int, ...]
        Per-sample shape of A_0.
    n_classes : int
        Number of classes, the per-sample width of the logits.
    shortcuts : list[tuple[int, int]]
        (from, to) activation indices; A_to += A_from after layer to - 1.
    """

    def __init__(
        self,
        layers: list[Layer],
        input_shape: tuple[int, ...],
        n_classes: int,
        shortcuts: list[tuple[int, int]] = (),
    ) -> None:
        if not layers:
            msg = "A network needs at least one layer."
            logging.error(msg)
            raise NetworkError(msg)
        self._layers = list(layers)
        self._input_shape = tuple(input_shape)
        self._n_classes = n_classes
        self._shortcuts = sorted(tuple(edge) for edge in shortcuts)

        self._shapes = self._trace_shapes()
        if self._shapes[-1] != (n_classes,):
            msg = (
                f"The network outputs per-sample shape {self._shapes[-1]}, "
                f"expected ({n_classes},) logits."
            )
            logging.error(msg)
            raise NetworkShapeError(msg, layer_index=len(self._layers) - 1)
        self._assert_valid_shortcuts()
        self._assert_unique_names()

    @property
    def layers(self) -> list[Layer]:
        return list(self._layers)

    @property
    def input_shape(self) -> tuple[int, ...]:
        return self._input_shape

    @property
    def n_classes(self) -> int:
        return self._n_classes

    @property
    def shortcuts(self) -> list[tuple[int, int]]:
        return list(self._shortcuts)

    @property
    def num_params(self) -> int:
        """Returns the number of trainable scalars."""
        return sum(param.size for param in self.collect_params())

    def __len__(self) -> int:
        return len(self._layers)

    def _trace_shapes(self) -> list[tuple[int, ...]]:
        shapes = [self._input_shape]
        for i, layer in enumerate(self._layers):
            try:
                shapes.append(tuple(layer.output_shape(shapes[-1])))
            except (TensorError, GeometryError) as e:
                msg = f"Layer {i} ({layer.kind}) rejects input shape {shapes[-1]}: {e}"
                logging.error(msg)
                raise NetworkShapeError(msg, layer_index=i) from e
        return shapes

    def _assert_valid_shortcuts(self) -> None:
        n_activations = len(self._shapes)
        for src, dst in self._shortcuts:
            if not 0 <= src < dst < n_activations:
                msg = (
                    f"Shortcut ({src}, {dst}) must satisfy 0 <= from < to < "
                    f"{n_activations}."
                )
            elif dst - src < 2:
                msg = f"Shortcut ({src}, {dst}) must skip at least 2 layers."
            elif self._shapes[src] != self._shapes[dst]:
                msg = (
                    f"Shortcut ({src}, {dst}) joins activations of different shapes "
                    f"{self._shapes[src]} and {self._shapes[dst]}."
                )
            else:
                continue
            logging.error(msg)
            raise NetworkShapeError(msg, layer_index=dst - 1)

    def _assert_unique_names(self) -> None:
        names = [param.name for param in self.collect_params()]
        for layer in self._layers:
            names.extend(layer.state_tensors())
        duplicates = sorted({name for name in names if names.count(name) > 1})
        if duplicates:
            msg = f"Duplicate parameter or state names in network: {duplicates}."
            logging.error(msg)
            raise NetworkError(msg)

    def _shortcut_sources(self) -> dict[int, list[int]]:
        """Maps each shortcut end to the activations that are added into it."""
        sources = {}
        for src, dst in self._shortcuts:
            sources.setdefault(dst, []).append(src)
        return sources

    def shape_trace(self) -> list[tuple[str, tuple[int, ...]]]:
        """
        Per-sample activation shapes: ('input', shape of A_0) followed by one
        (layer description, shape of its output) pair per layer.
        """
        rows = [("input", self._shapes[0])]
        for layer, shape in zip(self._layers, self._shapes[1:]):
            rows.append((layer.describe(), shape))
        return rows

    def forward(
        self, a0: np.ndarray, mode: str = TRAIN
    ) -> tuple[np.ndarray, list[np.ndarray]]:
        """
        Runs the forward pass.

        Parameters
        ----------
        a0: np.ndarray
            Minibatch input with per-sample shape 'input_shape'.
        mode: str
            'train' fills the layer caches, 'infer' leaves none.

        Returns
        -------
        tuple[np.ndarray, list[np.ndarray]]
            The n x n_c logits and the activation trace [A_0, ..., A_L].

        Raises
        ------
        NetworkShapeError
            If the input or any intermediate array has the wrong shape.
        """
        assert_valid_mode(mode)
        a0 = np.asarray(a0, dtype=np.float64)
        if a0.ndim != len(self._input_shape) + 1 or a0.shape[1:] != self._input_shape:
            msg = (
                f"Network input of shape {a0.shape} does not match per-sample "
                f"shape {self._input_shape}."
            )
            logging.error(msg)
            raise NetworkShapeError(msg, layer_index=0)

        ends = self._shortcut_sources()
        trace = [a0]
        for i, layer in enumerate(self._layers):
            try:
                out = layer.forward(trace[-1], mode)
            except (TensorError, GeometryError) as e:
                msg = f"Forward pass failed at layer {i} ({layer.kind}): {e}"
                logging.error(msg)
                raise NetworkShapeError(msg, layer_index=i) from e
            for src in ends.get(i + 1, []):
                out = shortcut_add(trace[src], out)
            trace.append(out)
        return trace[-1], trace

    def predict(self, a0: np.ndarray) -> np.ndarray:
        """Returns the infer-mode class probabilities Y_pred."""
        logits, _ = self.forward(a0, mode="infer")
        return softmax_forward(logits)

    def backward(self, y_pred: np.ndarray, y_gt: np.ndarray) -> None:
        """
        Backpropagates Delta = Y_pred - Y_gt through every layer, filling the
        gradient of every ParamTensor. The error of the input, Delta_0, is
        discarded.

        Raises
        ------
        LayerUsageError
            If a layer holds no train-mode cache.
        """
        self.backward_from(softmax_ce_backward(y_pred, y_gt))

    def backward_from(self, delta: np.ndarray) -> np.ndarray:
        """
        Backpropagates an arbitrary error at the embedding and returns Delta_0.
        """
        return self.backward_trace(delta)[0]

    def backward_trace(self, delta: np.ndarray) -> list[np.ndarray]:
        """
        Backpropagates 'delta' (the error of A_L) and returns the error of
        every activation, [Delta_0, ..., Delta_L]. Delta_i has the shape of
        A_i and includes the contribution of every shortcut leaving A_i.

        Raises
        ------
        LayerUsageError
            If a layer holds no train-mode cache.
        """
        missing = [i for i, layer in enumerate(self._layers) if not layer.has_cache]
        if missing:
            msg = (
                f"Layers {missing} hold no forward cache; run a train-mode forward "
                "before backward."
            )
            logging.error(msg)
            raise LayerUsageError(msg)

        starts = self._shortcut_sources()
        pending = {}
        deltas = [delta]
        for i in range(len(self._layers) - 1, -1, -1):
            for src in starts.get(i + 1, []):
                skip, delta = shortcut_backward(delta)
                pending[src] = pending.get(src, 0.0) + skip
            delta = self._layers[i].backward(delta)
            if i in pending:
                delta = delta + pending.pop(i)
            deltas.append(delta)
        return deltas[::-1]

    def collect_params(self) -> list[ParamTensor]:
        """
        Returns every trainable parameter in update order: reverse layer order,
        weights before biases within a layer.
        """
        params = []
        for layer in reversed(self._layers):
            params.extend(layer.params)
        return params

    def apply_update(self, step: dict[str, np.ndarray]) -> None:
        """
        Adds step[name] to the parameter called 'name', in place.

        Raises
        ------
        NetworkError
            If 'step' names an unknown parameter or has the wrong shape.
        """
        params = {param.name: param for param in self.collect_params()}
        unknown = [name for name in step if name not in params]
        if unknown:
            msg = f"Update names unknown parameters {unknown}."
            logging.error(msg)
            raise NetworkError(msg)
        for name, delta in step.items():
            delta = np.asarray(delta, dtype=np.float64)
            if delta.shape != params[name].shape:
                msg = (
                    f"Update for '{name}' has shape {delta.shape}, parameter has "
                    f"shape {params[name].shape}."
                )
                logging.error(msg)
                raise NetworkShapeError(msg)
        for name, delta in step.items():
            params[name].value[...] += delta

    def zero_grad(self) -> None:
        for param in self.collect_params():
            param.zero_grad()

    def clear_caches(self) -> None:
        for layer in self._layers:
            layer.clear_cache()

    def state_tensors(self) -> dict[str, np.ndarray]:
        """Returns the non-trainable arrays of every layer, by name."""
        tensors = {}
        for layer in self._layers:
            tensors.update(layer.state_tensors())
        return tensors

    def load_state_tensor(self, name: str, value: np.ndarray) -> None:
        """Restores the state tensor called 'name' in whichever layer owns it."""
        for layer in self._layers:
            if name in layer.state_tensors():
                layer.load_state_tensor(name, value)
                return
        msg = f"No layer owns a state tensor named '{name}'."
        logging.error(msg)
        raise NetworkError(msg)
