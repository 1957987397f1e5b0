"""Calibration file I/O.

A calibration file is a raw little-endian f32 blob (samples concatenated,
row-major) with a JSON sidecar ``{"count": B, "shape": [...]}`` next to it.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np
from pydantic import BaseModel, Field, ValidationError

from ..errors import IoFailureError, ManifestMismatchError, MissingFileError
from ..models.calibration import CalibrationSet
from ..models.enums import CalibSource
from .container import F32_LE


class CalibrationSidecar(BaseModel):
    count: int = Field(ge=1)
    shape: list[int] = Field(min_length=1)


def sidecar_path(path: Path) -> Path:
    """``C.bin`` -> ``C.json``."""
    return path.with_suffix(".json")


def save_calibration(calib: CalibrationSet, path: Path | str) -> Path:
    """Write the sample blob and its sidecar."""
    path = Path(path)
    sidecar = CalibrationSidecar(count=calib.count, shape=list(calib.sample_shape))
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(calib.samples.astype(F32_LE).tobytes())
        sidecar_path(path).write_text(json.dumps(sidecar.model_dump()), encoding="utf-8")
    except OSError as e:
        raise IoFailureError(f"Cannot write {path}: {e}") from e
    return path


def load_calibration(path: Path | str) -> CalibrationSet:
    """Read a calibration blob and its sidecar."""
    path = Path(path)
    meta_path = sidecar_path(path)
    for entry in (path, meta_path):
        if not entry.exists():
            raise MissingFileError(entry)
    try:
        meta = CalibrationSidecar.model_validate_json(meta_path.read_text(encoding="utf-8"))
    except ValidationError as e:
        raise ManifestMismatchError(f"Invalid calibration sidecar {meta_path}") from e

    blob = path.read_bytes()
    expected = 4 * meta.count * math.prod(meta.shape)
    if len(blob) != expected:
        raise ManifestMismatchError(
            f"Calibration sidecar declares {expected} bytes, blob holds {len(blob)}"
        )
    samples = np.frombuffer(blob, dtype=F32_LE).reshape(meta.count, *meta.shape)
    return CalibrationSet(samples=samples.astype(np.float32), source=CalibSource.FILE)
