"""On-disk formats for RIQ."""

from .archive import read_archive, write_archive
from .calibration import load_calibration, save_calibration
from .container import load_model, save_model

__all__ = [
    "load_calibration",
    "load_model",
    "read_archive",
    "save_calibration",
    "save_model",
    "write_archive",
]
