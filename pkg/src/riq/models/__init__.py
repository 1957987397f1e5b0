"""Data models for RIQ."""

from .archive import ArchiveExtras, CompressedArchive, LayerRecord
from .calibration import CalibrationSet, DeviationReport
from .enums import Activation, CalibSource, Eps0Policy, InitFamily, LayerKind
from .network import LayerSpec, Model, ModelManifest
from .quantized import DEFAULT_EPS0, QuantConfig, QuantizedLayer, QuantizedModel

__all__ = [
    "Activation",
    "ArchiveExtras",
    "CalibSource",
    "CalibrationSet",
    "CompressedArchive",
    "DEFAULT_EPS0",
    "DeviationReport",
    "Eps0Policy",
    "InitFamily",
    "LayerKind",
    "LayerRecord",
    "LayerSpec",
    "Model",
    "ModelManifest",
    "QuantConfig",
    "QuantizedLayer",
    "QuantizedModel",
]
