"""Compressed archive (``.rqz``) serialization.

Layout (all little-endian):

    magic "RQZ1" | u16 version | u32 layer_count
    per layer: u16 name_len | name | u32 n | f64 delta | table | u32 stream_len | stream
    u32 extras_len | extras (u32 manifest_len | manifest JSON | raw f32 biases)
    u64 FNV-1a checksum of every preceding byte

The extras block is stored raw and is not part of the coded size.
"""

from __future__ import annotations

import logging
import struct
from pathlib import Path

from ..coding.table import FrequencyTable
from ..errors import (
    BadMagicError,
    ChecksumMismatchError,
    CorruptStreamError,
    IoFailureError,
    ManifestMismatchError,
    MissingFileError,
    VersionUnsupportedError,
)
from ..models.archive import (
    ARCHIVE_MAGIC,
    ARCHIVE_VERSION,
    ArchiveExtras,
    CompressedArchive,
    LayerRecord,
)
from .container import parse_manifest

logger = logging.getLogger(__name__)

FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3
MASK64 = (1 << 64) - 1
CHECKSUM_BYTES = 8


def fnv1a64(data: bytes) -> int:
    """64-bit FNV-1a hash."""
    h = FNV_OFFSET
    for byte in data:
        h ^= byte
        h = (h * FNV_PRIME) & MASK64
    return h


def _encode_extras(extras: ArchiveExtras) -> bytes:
    manifest = extras.manifest.model_dump_json().encode("utf-8") if extras.manifest else b""
    return struct.pack("<I", len(manifest)) + manifest + extras.biases


def archive_to_bytes(archive: CompressedArchive) -> bytes:
    """Serialize an archive; also fills in its ``coded_bytes`` / ``total_bytes``."""
    out = bytearray(ARCHIVE_MAGIC)
    out += struct.pack("<HI", archive.version, len(archive.records))
    for record in archive.records:
        name = record.name.encode("utf-8")
        out += struct.pack("<H", len(name)) + name
        out += struct.pack("<Id", record.n, record.delta)
        out += record.table.to_bytes()
        out += struct.pack("<I", len(record.stream)) + record.stream

    extras = _encode_extras(archive.extras)
    out += struct.pack("<I", len(extras)) + extras
    out += struct.pack("<Q", fnv1a64(bytes(out)))

    archive.total_bytes = len(out)
    archive.coded_bytes = len(out) - 4 - len(extras)
    return bytes(out)


class _Reader:
    def __init__(self, buf: bytes, offset: int = 0):
        self.buf = buf
        self.offset = offset

    def take(self, size: int) -> bytes:
        if self.offset + size > len(self.buf):
            raise CorruptStreamError("Archive truncated")
        chunk = self.buf[self.offset : self.offset + size]
        self.offset += size
        return chunk

    def unpack(self, fmt: str) -> tuple:
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))


def archive_from_bytes(buf: bytes) -> CompressedArchive:
    """Parse and verify an archive.

    Raises:
        BadMagicError, VersionUnsupportedError, ChecksumMismatchError, CorruptStreamError
    """
    if buf[:4] != ARCHIVE_MAGIC:
        raise BadMagicError(f"Not an RQZ archive (magic {buf[:4]!r})")
    if len(buf) < 4 + 6 + CHECKSUM_BYTES:
        raise CorruptStreamError("Archive truncated")
    body, (stored,) = buf[:-CHECKSUM_BYTES], struct.unpack("<Q", buf[-CHECKSUM_BYTES:])
    if fnv1a64(body) != stored:
        raise ChecksumMismatchError("Archive checksum does not match its contents")

    reader = _Reader(body, 4)
    version, count = reader.unpack("<HI")
    if version != ARCHIVE_VERSION:
        raise VersionUnsupportedError(f"Archive version {version} is not supported")

    records = []
    for _ in range(count):
        (name_len,) = reader.unpack("<H")
        try:
            name = reader.take(name_len).decode("utf-8")
        except UnicodeDecodeError as e:
            raise CorruptStreamError("Layer name is not valid UTF-8") from e
        n, delta = reader.unpack("<Id")
        table, reader.offset = FrequencyTable.from_bytes(body, reader.offset)
        (stream_len,) = reader.unpack("<I")
        stream = reader.take(stream_len)
        records.append(LayerRecord(name=name, n=n, delta=delta, table=table, stream=stream))

    (extras_len,) = reader.unpack("<I")
    extras_buf = reader.take(extras_len)
    if reader.offset != len(body):
        raise CorruptStreamError("Trailing bytes after the extras block")

    extras = ArchiveExtras()
    if extras_buf:
        extras_reader = _Reader(extras_buf)
        (manifest_len,) = extras_reader.unpack("<I")
        manifest_bytes = extras_reader.take(manifest_len)
        if manifest_bytes:
            try:
                extras.manifest = parse_manifest(manifest_bytes)
            except ManifestMismatchError as e:
                raise CorruptStreamError(f"Embedded manifest is invalid: {e}") from e
        extras.biases = extras_buf[extras_reader.offset :]

    return CompressedArchive(
        records=records,
        extras=extras,
        version=version,
        coded_bytes=len(buf) - 4 - extras_len,
        total_bytes=len(buf),
    )


def write_archive(archive: CompressedArchive, path: Path | str) -> Path:
    """Write an archive to ``path``."""
    path = Path(path)
    data = archive_to_bytes(archive)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(data)
    except OSError as e:
        raise IoFailureError(f"Cannot write {path}: {e}") from e
    logger.debug("Wrote %s (%d bytes, %d coded)", path, archive.total_bytes, archive.coded_bytes)
    return path


def read_archive(path: Path | str) -> CompressedArchive:
    """Read and verify an archive from ``path``."""
    path = Path(path)
    if not path.exists():
        raise MissingFileError(path)
    try:
        data = path.read_bytes()
    except OSError as e:
        raise IoFailureError(f"Cannot read {path}: {e}") from e
    return archive_from_bytes(data)
