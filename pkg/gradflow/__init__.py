# Functions
from .cli.checkpoint import load_checkpoint, save_checkpoint
from .gradcheck.checker import check_layer, check_network, run_checks
from .mnist.dataset import load_mnist
from .mnist.synthetic import synthetic_dataset
from .network.architecture import parse_architecture, reference_architecture
from .network.builder import build_from_architecture, build_reference_net
from .optim.sgd import sgd_step
from .optim.trainer import evaluate, fit, train_epoch

# Types
from .cli.checkpoint import CheckpointState
from .gradcheck.report import GradCheckReport
from .mnist.dataset import Dataset
from .network.architecture import Architecture
from .network.network import Network
from .optim.config import TrainConfig
from .optim.trainer import MetricsRecord

__all__ = [
    "Architecture",
    "CheckpointState",
    "Dataset",
    "GradCheckReport",
    "MetricsRecord",
    "Network",
    "TrainConfig",
    "build_from_architecture",
    "build_reference_net",
    "check_layer",
    "check_network",
    "evaluate",
    "fit",
    "load_checkpoint",
    "load_mnist",
    "parse_architecture",
    "reference_architecture",
    "run_checks",
    "save_checkpoint",
    "sgd_step",
    "synthetic_dataset",
    "train_epoch",
]
