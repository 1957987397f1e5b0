"""Model container (``.riqm``) I/O.

A container is either a directory or a 2-entry stored zip holding
``manifest.json`` and ``weights.bin``. The blob holds, for each layer in
manifest order, n_l little-endian f32 weights followed by bias_count f32
biases.
"""

from __future__ import annotations

import json
import logging
import zipfile
from pathlib import Path

import numpy as np
from pydantic import ValidationError

from ..errors import (
    IoFailureError,
    ManifestMismatchError,
    MissingFileError,
    NonFiniteWeightError,
)
from ..models.network import Model, ModelManifest

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"
BLOB_NAME = "weights.bin"
F32_LE = np.dtype("<f4")


def encode_blob(model: Model) -> bytes:
    """Concatenate weights and biases as little-endian f32 in manifest order."""
    parts: list[bytes] = []
    for w, b in zip(model.weights, model.biases):
        parts.append(w.astype(F32_LE).tobytes())
        parts.append(b.astype(F32_LE).tobytes())
    return b"".join(parts)


def decode_blob(manifest: ModelManifest, blob: bytes) -> Model:
    """Split a blob into per-layer weights and biases according to the manifest."""
    expected = manifest.blob_size
    if len(blob) != expected:
        raise ManifestMismatchError(
            f"Manifest declares {expected} bytes of weights and biases, blob holds {len(blob)}"
        )
    values = np.frombuffer(blob, dtype=F32_LE)
    weights, biases = [], []
    offset = 0
    for layer in manifest.layers:
        weights.append(values[offset : offset + layer.n].astype(np.float32))
        offset += layer.n
        biases.append(values[offset : offset + layer.bias_count].astype(np.float32))
        offset += layer.bias_count
    return Model(
        layers=manifest.layers,
        weights=weights,
        biases=biases,
        input_shape=tuple(manifest.input_shape) if manifest.input_shape else None,
    )


def parse_manifest(text: str | bytes) -> ModelManifest:
    """Parse and validate a manifest document."""
    try:
        return ModelManifest.model_validate_json(text)
    except ValidationError as e:
        raise ManifestMismatchError(f"Invalid manifest: {e.errors()[0]['msg']}") from e


def _read_entries(path: Path) -> tuple[bytes, bytes]:
    if path.is_dir():
        manifest_path = path / MANIFEST_NAME
        blob_path = path / BLOB_NAME
        for entry in (manifest_path, blob_path):
            if not entry.exists():
                raise MissingFileError(entry)
        return manifest_path.read_bytes(), blob_path.read_bytes()

    try:
        with zipfile.ZipFile(path) as archive:
            names = set(archive.namelist())
            for entry in (MANIFEST_NAME, BLOB_NAME):
                if entry not in names:
                    raise MissingFileError(f"{path}!{entry}")
            return archive.read(MANIFEST_NAME), archive.read(BLOB_NAME)
    except zipfile.BadZipFile as e:
        raise ManifestMismatchError(f"{path} is neither a directory nor a stored zip") from e


def load_model(path: Path | str) -> Model:
    """Load a model container from a directory or a packed zip.

    Raises:
        MissingFileError: path (or one of its entries) does not exist
        ManifestMismatchError: manifest invalid or blob length disagrees
        NonFiniteWeightError: some weight or bias is NaN/Inf
    """
    path = Path(path)
    if not path.exists():
        raise MissingFileError(path)
    try:
        manifest_bytes, blob = _read_entries(path)
    except OSError as e:
        raise IoFailureError(f"Cannot read {path}: {e}") from e

    model = decode_blob(parse_manifest(manifest_bytes), blob)
    logger.debug("Loaded %s: %d layers, %d weights", path, model.num_layers, model.total_weights)
    return model


def save_model(model: Model, path: Path | str, packed: bool = False) -> Path:
    """Write a model container.

    Args:
        model: Model to write
        path: Target directory (or zip file when ``packed``)
        packed: Write a 2-entry stored zip instead of a directory

    Returns:
        The path written
    """
    path = Path(path)
    for layer, w, b in zip(model.layers, model.weights, model.biases):
        bad = int(np.count_nonzero(~np.isfinite(w))) + int(np.count_nonzero(~np.isfinite(b)))
        if bad:
            raise NonFiniteWeightError(layer.name, bad)

    manifest_text = json.dumps(model.manifest().model_dump(mode="json"), indent=2)
    blob = encode_blob(model)
    try:
        if packed:
            path.parent.mkdir(parents=True, exist_ok=True)
            with zipfile.ZipFile(path, "w", compression=zipfile.ZIP_STORED) as archive:
                archive.writestr(MANIFEST_NAME, manifest_text)
                archive.writestr(BLOB_NAME, blob)
        else:
            path.mkdir(parents=True, exist_ok=True)
            (path / MANIFEST_NAME).write_text(manifest_text, encoding="utf-8")
            (path / BLOB_NAME).write_bytes(blob)
    except OSError as e:
        raise IoFailureError(f"Cannot write {path}: {e}") from e

    logger.debug("Saved %s (%d bytes of weights and biases)", path, len(blob))
    return path
