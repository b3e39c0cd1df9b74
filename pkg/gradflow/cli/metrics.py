"""
Metrics CSV sink: one 'epoch,batch,loss,accuracy' line per training step.
"""

# standard library imports
import logging

# local imports
from gradflow.filesys.file import File
from gradflow.filesys.manager import FileSystemManager
from gradflow.optim.trainer import MetricsRecord, MetricsSink

# 3rd party imports
import pandas as pd

COLUMNS = list(MetricsRecord._fields)


class CsvMetricsSink(MetricsSink):
    """
    Appends every record to a CSV file as it arrives, so a crashed run keeps
    the metrics of the steps it finished. The file is truncated and given a
    header on construction.
    """

    def __init__(self, path: str) -> None:
        super().__init__()
        FileSystemManager().assert_valid_output_path(path)
        self._path = path
        pd.DataFrame(columns=COLUMNS).to_csv(path, index=False)
        logging.info("Writing metrics to '{}'.".format(path))

    @property
    def path(self) -> str:
        return self._path

    def write(self, record: MetricsRecord) -> None:
        super().write(record)
        frame = pd.DataFrame([record._asdict()], columns=COLUMNS)
        frame.to_csv(self._path, mode="a", header=False, index=False)


def read_metrics(path: str) -> pd.DataFrame:
    """Reads a metrics CSV written by CsvMetricsSink."""
    metrics_file = File(path)
    metrics_file.assert_exists()
    return pd.read_csv(path)
