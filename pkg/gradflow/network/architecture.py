"""
Declarative architecture descriptions.

An architecture is a small text file with one layer per line:

    # comment
    input d=1 r=28
    classes n=10
    conv out=6 k=5 s=1 p=0
    relu
    batchnorm momentum=0.1 eps=1e-05
    maxpool k=2 s=2 p=0
    flatten
    fc out=10
    shortcut from=2 to=4

Layer lines are numbered from 0 in file order ('input', 'classes' and
'shortcut' lines are not layers). A shortcut 'from=i to=j' adds activation
A_i to activation A_j, where A_0 is the network input and A_j is the output
of layer j - 1.
"""

# standard library imports
import logging
import zlib

# current package imports
from .exceptions import ArchitectureError

# local imports
from gradflow.filesys.file import File
from gradflow.utils.config_manager import ConfigManager

LAYER_KINDS = ("conv", "maxpool", "relu", "batchnorm", "flatten", "fc")
DEFAULT_CLASSES = 10

# kind -> {key: (type, default)}; a default of None marks a required key
_SCHEMA = {
    "input": {"d": (int, None), "r": (int, None), "f": (int, None)},
    "classes": {"n": (int, None)},
    "conv": {"out": (int, None), "k": (int, None), "s": (int, 1), "p": (int, 0)},
    "maxpool": {"k": (int, None), "s": (int, None), "p": (int, 0)},
    "relu": {},
    "batchnorm": {"momentum": (float, 0.1), "eps": (float, 1e-5)},
    "flatten": {},
    "fc": {"out": (int, None)},
    "shortcut": {"from": (int, None), "to": (int, None)},
}

REFERENCE_ARCHITECTURE = """\
input d=1 r=28
classes n=10
conv out=6 k=5 s=1 p=0
relu
batchnorm
maxpool k=2 s=2 p=0
conv out=16 k=5 s=1 p=0
relu
batchnorm
maxpool k=2 s=2 p=0
flatten
fc out=120
relu
batchnorm
fc out=84
relu
batchnorm
fc out=10
"""


class ArchitectureConfigManager(ConfigManager):
    """
    Validates a single architecture entry, given as a dictionary holding the
    entry 'kind' and its hyperparameters.
    """

    def impute_default_config(self, config: dict) -> dict:
        """
        Fills optional hyperparameters with their defaults. A maxpool without a
        stride uses non-overlapping windows (s = k).
        """
        config = dict(config)
        schema = _SCHEMA.get(config.get("kind"), {})
        for key, (_, default) in schema.items():
            if key not in config and default is not None:
                config[key] = default
        if config.get("kind") == "maxpool" and "s" not in config and "k" in config:
            config["s"] = config["k"]
        return config

    def check_valid_config(self, config: dict) -> str | None:
        kind = config.get("kind")
        if kind not in _SCHEMA:
            return f"Unknown entry kind '{kind}'. Valid kinds: {list(_SCHEMA)}."
        schema = _SCHEMA[kind]
        values = {key: value for key, value in config.items() if key != "kind"}

        msg = self.check_keys(values, list(schema))
        if msg:
            return f"'{kind}': {msg}"

        if kind == "input":
            has_image = "d" in values or "r" in values
            if has_image == ("f" in values):
                return "'input' needs either 'd' and 'r' (images) or 'f' (features)."
            required = ["d", "r"] if has_image else ["f"]
        else:
            required = [key for key, (_, default) in schema.items() if default is None]
            if kind == "maxpool":
                required = ["k", "s"]
        msg = self.check_keys(values, list(schema), required)
        if msg:
            return f"'{kind}': {msg}"

        for key, value in values.items():
            value_type = schema[key][0]
            if value_type is int:
                minimum_zero = key in ("p", "from", "to")
                msg = (
                    self.check_non_negative_int(value, key)
                    if minimum_zero
                    else self.check_positive_int(value, key)
                )
                if msg:
                    return f"'{kind}': {msg}"
            else:
                msg = self._type_checker.check_real(value, key)
                if msg:
                    return f"'{kind}': {msg}"

        if kind == "batchnorm":
            if not 0 < values.get("momentum", 0.1) <= 1:
                return (
                    "'batchnorm': momentum must lie in (0, 1], "
                    f"got {values['momentum']}."
                )
            if not values.get("eps", 1e-5) > 0:
                return f"'batchnorm': eps must be positive, got {values['eps']}."
        if kind == "shortcut" and values["to"] - values["from"] < 2:
            return (
                f"'shortcut': must skip at least 2 layers, got from={values['from']} "
                f"to={values['to']}."
            )
        return None

    def error_type(self) -> type[ArchitectureError]:
        return ArchitectureError


class Architecture:
    """
    Parsed network description: input shape, class count, ordered layer
    entries and shortcut edges.

    Attributes
    ----------
    input_shape : tuple[int, ...]
        Per-sample input shape, (d, r, r) for images or (f,) for features.
    n_classes : int
        Width of the classifier head.
    layers : list[dict]
        Layer entries with defaults imputed, each holding 'kind'.
    shortcuts : list[tuple[int, int]]
        (from, to) activation indices.
    """

    def __init__(
        self,
        input_shape: tuple[int, ...],
        n_classes: int,
        layers: list[dict],
        shortcuts: list[tuple[int, int]] = (),
    ) -> None:
        self._input_shape = tuple(input_shape)
        self._n_classes = n_classes
        self._layers = [dict(layer) for layer in layers]
        self._shortcuts = [tuple(edge) for edge in shortcuts]

    @property
    def input_shape(self) -> tuple[int, ...]:
        return self._input_shape

    @property
    def n_classes(self) -> int:
        return self._n_classes

    @property
    def layers(self) -> list[dict]:
        return [dict(layer) for layer in self._layers]

    @property
    def shortcuts(self) -> list[tuple[int, int]]:
        return list(self._shortcuts)

    def to_text(self) -> str:
        """
        Canonical text form: every hyperparameter written out in schema order,
        shortcuts last. Parsing the result gives back an equal Architecture.
        """
        if len(self._input_shape) == 3:
            lines = [f"input d={self._input_shape[0]} r={self._input_shape[1]}"]
        else:
            lines = [f"input f={self._input_shape[0]}"]
        lines.append(f"classes n={self._n_classes}")
        for layer in self._layers:
            lines.append(_format_entry(layer))
        for src, dst in self._shortcuts:
            lines.append(f"shortcut from={src} to={dst}")
        return "\n".join(lines) + "\n"

    def fingerprint(self) -> int:
        """Returns the CRC-32 of the canonical text form."""
        return zlib.crc32(self.to_text().encode("ascii"))

    def __str__(self) -> str:
        return self.to_text()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Architecture):
            return False
        return self.to_text() == other.to_text()


def _format_entry(entry: dict) -> str:
    kind = entry["kind"]
    tokens = [kind]
    for key, (value_type, _) in _SCHEMA[kind].items():
        if key not in entry:
            continue
        value = entry[key]
        tokens.append(f"{key}={repr(float(value)) if value_type is float else value}")
    return " ".join(tokens)


def _parse_value(kind: str, key: str, raw: str, line_no: int):
    value_type = _SCHEMA.get(kind, {}).get(key, (str, None))[0]
    try:
        return value_type(raw)
    except ValueError:
        msg = f"Line {line_no}: cannot read '{key}={raw}' as {value_type.__name__}."
        logging.error(msg)
        raise ArchitectureError(msg)


def parse_entry(line: str, line_no: int = 0) -> dict | None:
    """
    Parses one architecture line into a validated entry dictionary with defaults
    imputed. Returns None for blank and comment-only lines.

    Raises
    ------
    ArchitectureError
        If the line is malformed or the entry is invalid.
    """
    content = line.split("#", 1)[0].strip()
    if not content:
        return None
    kind, *tokens = content.split()
    entry = {"kind": kind}
    for token in tokens:
        key, sep, raw = token.partition("=")
        if not sep or not key or not raw:
            msg = f"Line {line_no}: expected 'key=value', got '{token}'."
            logging.error(msg)
            raise ArchitectureError(msg)
        if key in entry:
            msg = f"Line {line_no}: duplicate key '{key}'."
            logging.error(msg)
            raise ArchitectureError(msg)
        entry[key] = _parse_value(kind, key, raw, line_no)

    manager = ArchitectureConfigManager()
    entry = manager.impute_default_config(entry)
    msg = manager.check_valid_config(entry)
    if msg:
        msg = f"Line {line_no}: {msg}"
        logging.error(msg)
        raise ArchitectureError(msg)
    return entry


def parse_architecture(text: str) -> Architecture:
    """
    Parses an architecture description.

    Parameters
    ----------
    text: str
        One entry per line, see the module docstring.

    Returns
    -------
    Architecture

    Raises
    ------
    ArchitectureError
        If any line is invalid, 'input' is missing or repeated, or the
        description holds no layer.
    """
    input_shape = None
    n_classes = None
    layers = []
    shortcuts = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        entry = parse_entry(line, line_no)
        if entry is None:
            continue
        kind = entry["kind"]
        if kind == "input":
            if input_shape is not None:
                _raise(f"Line {line_no}: 'input' declared twice.")
            if "f" in entry:
                input_shape = (entry["f"],)
            else:
                input_shape = (entry["d"], entry["r"], entry["r"])
        elif kind == "classes":
            if n_classes is not None:
                _raise(f"Line {line_no}: 'classes' declared twice.")
            n_classes = entry["n"]
        elif kind == "shortcut":
            shortcuts.append((entry["from"], entry["to"]))
        else:
            layers.append(entry)

    if input_shape is None:
        _raise("Architecture has no 'input' entry.")
    if not layers:
        _raise("Architecture has no layers.")
    if n_classes is None:
        n_classes = DEFAULT_CLASSES
    logging.debug(
        "Parsed architecture with {} layers and {} shortcuts.".format(
            len(layers), len(shortcuts)
        )
    )
    return Architecture(input_shape, n_classes, layers, shortcuts)


def load_architecture(path: str) -> Architecture:
    """
    Reads and parses the architecture file at 'path'.
    """
    arch_file = File(path)
    arch_file.assert_exists()
    logging.info("Loading architecture from '{}'.".format(path))
    return parse_architecture(arch_file.read_bytes().decode("utf-8"))


def reference_architecture() -> Architecture:
    """Returns the 16-layer reference architecture for 28 x 28 digit images."""
    return parse_architecture(REFERENCE_ARCHITECTURE)


def _raise(msg: str) -> None:
    logging.error(msg)
    raise ArchitectureError(msg)
