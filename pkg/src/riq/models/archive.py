"""Compressed archive data types."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..coding.table import FrequencyTable
from .network import ModelManifest

ARCHIVE_MAGIC = b"RQZ1"
ARCHIVE_VERSION = 1


@dataclass
class LayerRecord:
    """One layer's coded symbols."""

    name: str
    n: int
    delta: float
    table: FrequencyTable
    stream: bytes

    @property
    def bits_per_symbol(self) -> float:
        return 8.0 * len(self.stream) / self.n if self.n else 0.0


@dataclass
class ArchiveExtras:
    """Raw-stored model topology and biases carried beside the coded weights."""

    manifest: ModelManifest | None = None
    biases: bytes = b""


@dataclass
class CompressedArchive:
    records: list[LayerRecord]
    extras: ArchiveExtras = field(default_factory=ArchiveExtras)
    version: int = ARCHIVE_VERSION
    coded_bytes: int = 0  # header + layer records + checksum, filled by (de)serialization
    total_bytes: int = 0

    @property
    def layer_names(self) -> list[str]:
        return [record.name for record in self.records]

    @property
    def total_symbols(self) -> int:
        return sum(record.n for record in self.records)

    def record(self, name: str) -> LayerRecord:
        for record in self.records:
            if record.name == name:
                return record
        raise KeyError(name)
