"""Entropy coding of quantized models and compression-ratio accounting."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from ..coding import rans
from ..coding.table import DEFAULT_PRECISION, build_table, precision_for
from ..errors import (
    DegenerateRangeError,
    ManifestMismatchError,
    MismatchError,
    RiqError,
    UnknownLayerError,
    attach_layer,
)
from ..models.archive import ArchiveExtras, CompressedArchive, LayerRecord
from ..models.network import LayerSpec, Model, ModelManifest
from ..models.quantized import QuantizedLayer, QuantizedModel
from ..storage.archive import archive_to_bytes
from ..storage.container import F32_LE
from .forward import layer_distortion
from .quantizer import empirical_entropy, layer_rate

logger = logging.getLogger(__name__)

BASELINE_BITS = 32


@dataclass
class RatioReport:
    """Entropy-formula estimate and measured archive ratio side by side."""

    est_ratio: float
    actual_ratio: float
    total_symbols: int
    entropy_bits: float  # sum of n_l * H_l
    table_bits: int  # sum of |T_l|
    coded_bytes: int
    extras_bytes: int

    @property
    def inverse_ratio(self) -> float:
        return 1.0 / self.actual_ratio

    @property
    def bits_per_weight(self) -> float:
        return BASELINE_BITS / self.actual_ratio

    @property
    def relative_gap(self) -> float:
        """|estimate - actual| / actual."""
        return abs(self.est_ratio - self.actual_ratio) / self.actual_ratio


@dataclass
class LayerStats:
    """One row of ``layers.csv``."""

    layer: str
    n: int
    norm: float
    delta: float
    eps: float
    rate: float
    entropy: float
    alphabet_size: int = 0
    table_bits: int = 0
    stream_bytes: int = 0
    degenerate: bool = False

    @property
    def bits_per_symbol(self) -> float:
        return 8.0 * self.stream_bytes / self.n if self.n else 0.0


def layer_table(layer: QuantizedLayer, precision: int = DEFAULT_PRECISION):
    """Frequency table of a layer, with the precision raised if the alphabet needs it."""
    alphabet_size = int(np.unique(layer.symbols).size)
    return build_table(layer.symbols, precision_for(alphabet_size, precision))


def estimate_bits(qmodel: QuantizedModel, precision: int = DEFAULT_PRECISION) -> tuple[float, int]:
    """(sum of n_l * H_l, sum of serialized table bits) over all layers."""
    if not qmodel.layers or qmodel.total_symbols == 0:
        raise MismatchError("Cannot estimate the size of an empty model")
    entropy_bits = 0.0
    table_bits = 0
    for layer in qmodel.layers:
        entropy_bits += layer.n * empirical_entropy(layer.symbols)
        table_bits += layer_table(layer, precision).serialized_bits
    return entropy_bits, table_bits


def estimate_ratio(qmodel: QuantizedModel, precision: int = DEFAULT_PRECISION) -> float:
    """Entropy-formula ratio 32 * N / (sum n_l H_l + sum |T_l|)."""
    entropy_bits, table_bits = estimate_bits(qmodel, precision)
    return BASELINE_BITS * qmodel.total_symbols / (entropy_bits + table_bits)


def _encode_biases(biases: list[np.ndarray]) -> bytes:
    if not any(b.size for b in biases):
        return b""
    return np.concatenate([np.asarray(b, dtype=F32_LE) for b in biases]).tobytes()


def build_archive(
    qmodel: QuantizedModel,
    model: Model | None = None,
    precision: int = DEFAULT_PRECISION,
) -> CompressedArchive:
    """Entropy-code every layer of ``qmodel`` into an archive.

    When ``model`` is given its manifest and biases are stored raw in the
    extras block so the archive decompresses to a complete model.
    """
    if not qmodel.layers:
        raise MismatchError("Cannot build an archive from an empty model")
    records = []
    for layer in qmodel.layers:
        try:
            table = layer_table(layer, precision)
            stream = rans.encode(layer.symbols, table)
        except RiqError as e:
            raise attach_layer(e, layer.name) from e
        records.append(
            LayerRecord(name=layer.name, n=layer.n, delta=layer.delta, table=table, stream=stream)
        )
        logger.debug(
            "Layer '%s': %d symbols, alphabet %d, %d stream bytes",
            layer.name,
            layer.n,
            table.size,
            len(stream),
        )

    extras = ArchiveExtras()
    if model is not None:
        if model.layer_names != qmodel.layer_names:
            raise MismatchError("Source model and quantized model list different layers")
        extras.manifest = model.manifest()
        extras.biases = _encode_biases(model.biases)

    archive = CompressedArchive(records=records, extras=extras)
    archive_to_bytes(archive)  # fills coded/total byte counts
    return archive


def _select(archive: CompressedArchive, layers: list[str] | None) -> list[LayerRecord]:
    if layers is None:
        return list(archive.records)
    available = archive.layer_names
    for name in layers:
        if name not in available:
            raise UnknownLayerError(name, available)
    return [record for record in archive.records if record.name in layers]


def decode_archive(
    archive: CompressedArchive, layers: list[str] | None = None
) -> QuantizedModel:
    """Decode the symbol streams of all (or the named) layers."""
    decoded = []
    for record in _select(archive, layers):
        try:
            symbols = rans.decode(record.stream, record.table, record.n)
        except RiqError as e:
            raise attach_layer(e, record.name) from e
        decoded.append(QuantizedLayer(name=record.name, delta=record.delta, symbols=symbols))
    source = []
    if archive.extras.manifest is not None:
        names = {layer.name for layer in decoded}
        source = [spec for spec in archive.extras.manifest.layers if spec.name in names]
    return QuantizedModel(layers=decoded, source=source)


def _split_biases(manifest: ModelManifest, raw: bytes) -> dict[str, np.ndarray]:
    expected = 4 * sum(spec.bias_count for spec in manifest.layers)
    if raw and len(raw) != expected:
        raise ManifestMismatchError(
            f"Archive stores {len(raw)} bias bytes, manifest expects {expected}"
        )
    flat = np.frombuffer(raw, dtype=F32_LE) if raw else np.zeros(expected // 4, dtype=np.float32)
    out: dict[str, np.ndarray] = {}
    offset = 0
    for spec in manifest.layers:
        out[spec.name] = flat[offset : offset + spec.bias_count].astype(np.float32)
        offset += spec.bias_count
    return out


def reconstruct_model(archive: CompressedArchive, layers: list[str] | None = None) -> Model:
    """Decode an archive into a model with float32 weights ``symbols * delta``.

    With ``layers`` only the named layers are decoded and returned.
    """
    manifest = archive.extras.manifest
    if manifest is None:
        raise ManifestMismatchError("Archive carries no model manifest; cannot rebuild a model")
    qmodel = decode_archive(archive, layers)
    specs: dict[str, LayerSpec] = {spec.name: spec for spec in manifest.layers}
    biases = _split_biases(manifest, archive.extras.biases)
    names = qmodel.layer_names
    input_shape = manifest.input_shape if names and names[0] == manifest.layers[0].name else None
    return Model(
        layers=[specs[name].model_copy() for name in names],
        weights=[layer.reconstruct(np.float32) for layer in qmodel.layers],
        biases=[biases[name] for name in names],
        input_shape=tuple(input_shape) if input_shape else None,
    )


def compression_ratio(qmodel: QuantizedModel, archive: CompressedArchive) -> RatioReport:
    """Report both the entropy-formula estimate and the measured archive ratio.

    The measured ratio counts the coded section of the archive (header, layer
    records and checksum); the raw extras block is reported separately.
    """
    if not qmodel.layers or not archive.records:
        raise MismatchError("Compression ratio of an empty model is undefined")
    if sorted(qmodel.layer_names) != sorted(archive.layer_names):
        raise MismatchError(
            f"Archive layers {archive.layer_names} differ from model layers {qmodel.layer_names}"
        )
    for layer in qmodel.layers:
        if archive.record(layer.name).n != layer.n:
            raise MismatchError(f"Layer '{layer.name}' symbol counts differ")
    if not archive.coded_bytes:
        archive_to_bytes(archive)

    precision = min(record.table.precision for record in archive.records)
    entropy_bits, table_bits = estimate_bits(qmodel, precision)
    n_total = qmodel.total_symbols
    return RatioReport(
        est_ratio=BASELINE_BITS * n_total / (entropy_bits + table_bits),
        actual_ratio=BASELINE_BITS * n_total / (8.0 * archive.coded_bytes),
        total_symbols=n_total,
        entropy_bits=entropy_bits,
        table_bits=table_bits,
        coded_bytes=archive.coded_bytes,
        extras_bytes=archive.total_bytes - archive.coded_bytes,
    )


def layer_stats(
    model: Model, qmodel: QuantizedModel, archive: CompressedArchive | None = None
) -> list[LayerStats]:
    """Per-layer norm, bin width, distortion, rate and entropy."""
    if model.layer_names != qmodel.layer_names:
        raise MismatchError("Quantized model does not match the source model's layers")
    rows = []
    for w, qlayer in zip(model.weights, qmodel.layers):
        w_hat = qlayer.reconstruct(np.float32)
        norm = float(np.linalg.norm(w.astype(np.float64)))
        if np.any(w) and np.any(w_hat):
            eps, _ = layer_distortion(w, w_hat)
        else:
            eps = 0.0 if not np.any(w) and not np.any(w_hat) else 1.0
        try:
            rate = layer_rate(w, qlayer.delta)
        except DegenerateRangeError:
            rate = 0.0
        row = LayerStats(
            layer=qlayer.name,
            n=qlayer.n,
            norm=norm,
            delta=qlayer.delta,
            eps=eps,
            rate=rate,
            entropy=empirical_entropy(qlayer.symbols),
            degenerate=qlayer.degenerate,
        )
        if archive is not None:
            record = archive.record(qlayer.name)
            row.alphabet_size = record.table.size
            row.table_bits = record.table.serialized_bits
            row.stream_bytes = len(record.stream)
        rows.append(row)
    return rows
