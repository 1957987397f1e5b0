"""Frequency tables for the rANS coder."""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from ..errors import (
    AlphabetTooLargeError,
    CorruptStreamError,
    EmptyInputError,
    SymbolNotInTableError,
)

DEFAULT_PRECISION = 12
MAX_PRECISION = 15


def zigzag(value: int) -> int:
    return value * 2 if value >= 0 else -2 * value - 1


def unzigzag(value: int) -> int:
    return value // 2 if value % 2 == 0 else -(value + 1) // 2


def write_varint(out: bytearray, value: int) -> None:
    while True:
        byte = value & 0x7F
        value >>= 7
        if value:
            out.append(byte | 0x80)
        else:
            out.append(byte)
            return


def read_varint(buf: bytes, offset: int) -> tuple[int, int]:
    value = 0
    shift = 0
    while True:
        if offset >= len(buf):
            raise CorruptStreamError("Truncated varint")
        byte = buf[offset]
        offset += 1
        value |= (byte & 0x7F) << shift
        if not byte & 0x80:
            return value, offset
        shift += 7
        if shift > 70:
            raise CorruptStreamError("Varint too long")


@dataclass(frozen=True)
class FrequencyTable:
    """Observed symbol counts and their normalization to 2^precision."""

    alphabet: np.ndarray  # sorted distinct symbol values (int64)
    counts: np.ndarray
    scaled: np.ndarray  # each >= 1, sums to 2^precision
    precision: int = DEFAULT_PRECISION

    @property
    def size(self) -> int:
        return int(self.alphabet.size)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def cumulative(self) -> np.ndarray:
        """Start of each symbol's slot range."""
        return np.concatenate(([0], np.cumsum(self.scaled)[:-1])).astype(np.int64)

    def index_of(self, symbols: np.ndarray) -> np.ndarray:
        """Positions of ``symbols`` in the alphabet."""
        symbols = np.asarray(symbols, dtype=np.int64).reshape(-1)
        if symbols.size == 0:
            return symbols
        idx = np.searchsorted(self.alphabet, symbols)
        idx = np.minimum(idx, self.size - 1)
        missing = self.alphabet[idx] != symbols
        if np.any(missing):
            raise SymbolNotInTableError(
                f"Symbol {int(symbols[np.argmax(missing)])} is not in the table"
            )
        return idx

    def entropy(self) -> float:
        """Bits/symbol under the scaled frequencies, weighted by observed counts."""
        p_model = self.scaled / float(1 << self.precision)
        weights = self.counts / self.counts.sum()
        return float(-np.sum(weights * np.log2(p_model)))

    def to_bytes(self) -> bytes:
        """u16 size, zig-zag varint alphabet deltas, u16 precision, u16 scaled counts."""
        out = bytearray(struct.pack("<H", self.size))
        prev = 0
        for value in self.alphabet.tolist():
            write_varint(out, zigzag(value - prev))
            prev = value
        out += struct.pack("<H", self.precision)
        out += self.scaled.astype("<u2").tobytes()
        return bytes(out)

    @property
    def serialized_bits(self) -> int:
        """|T_l|: size of the serialized table in bits."""
        return 8 * len(self.to_bytes())

    @classmethod
    def from_bytes(cls, buf: bytes, offset: int = 0) -> tuple["FrequencyTable", int]:
        """Parse a table; returns it with the offset just past it.

        Observed counts are not stored, so ``counts`` equals ``scaled``.
        """
        if offset + 2 > len(buf):
            raise CorruptStreamError("Truncated frequency table")
        (size,) = struct.unpack_from("<H", buf, offset)
        offset += 2
        alphabet = []
        prev = 0
        for _ in range(size):
            delta, offset = read_varint(buf, offset)
            prev += unzigzag(delta)
            alphabet.append(prev)
        if offset + 2 + 2 * size > len(buf):
            raise CorruptStreamError("Truncated frequency table")
        (precision,) = struct.unpack_from("<H", buf, offset)
        offset += 2
        scaled = np.frombuffer(buf, dtype="<u2", count=size, offset=offset).astype(np.int64)
        offset += 2 * size

        if not 1 <= precision <= MAX_PRECISION or size == 0:
            raise CorruptStreamError(f"Invalid table header (size={size}, precision={precision})")
        if int(scaled.sum()) != 1 << precision or np.any(scaled < 1):
            raise CorruptStreamError("Scaled counts do not sum to 2^precision")
        values = np.asarray(alphabet, dtype=np.int64)
        if np.any(np.diff(values) <= 0):
            raise CorruptStreamError("Alphabet is not strictly ascending")
        table = cls(alphabet=values, counts=scaled.copy(), scaled=scaled, precision=precision)
        return table, offset


def normalize_counts(counts: np.ndarray, precision: int) -> np.ndarray:
    """Largest-remainder scaling of counts to sum 2^precision, every entry >= 1."""
    counts = np.asarray(counts, dtype=np.int64)
    target = 1 << precision
    if counts.size > target:
        raise AlphabetTooLargeError(
            f"{counts.size} distinct symbols do not fit {precision}-bit frequencies"
        )
    total = int(counts.sum())
    exact = counts * target
    scaled = exact // total
    remainder = exact - scaled * total
    scaled = np.maximum(scaled, 1)

    diff = target - int(scaled.sum())
    if diff > 0:
        order = np.lexsort((np.arange(counts.size), -remainder))
        scaled[order[:diff]] += 1
    while diff < 0:
        # take back from the largest entries first; they lose the least relative mass
        donors = np.flatnonzero(scaled > 1)
        order = donors[np.lexsort((donors, remainder[donors], -scaled[donors]))]
        take = order[: -diff]
        scaled[take] -= 1
        diff += take.size
    return scaled


def build_table(symbols: np.ndarray, precision: int = DEFAULT_PRECISION) -> FrequencyTable:
    """Histogram ``symbols`` and normalize the counts to 2^precision."""
    symbols = np.asarray(symbols, dtype=np.int64).reshape(-1)
    if symbols.size == 0:
        raise EmptyInputError("Cannot build a frequency table from an empty stream")
    if not 1 <= precision <= MAX_PRECISION:
        raise ValueError(f"Invalid precision: {precision}. Must be in [1, {MAX_PRECISION}]")
    alphabet, counts = np.unique(symbols, return_counts=True)
    scaled = normalize_counts(counts, precision)
    return FrequencyTable(
        alphabet=alphabet.astype(np.int64),
        counts=counts.astype(np.int64),
        scaled=scaled,
        precision=precision,
    )


def precision_for(alphabet_size: int, default: int = DEFAULT_PRECISION) -> int:
    """Precision large enough for an alphabet: max(default, bit_length + 1), capped at 15."""
    needed = max(default, int(alphabet_size).bit_length() + 1)
    if alphabet_size > 1 << MAX_PRECISION:
        raise AlphabetTooLargeError(
            f"{alphabet_size} distinct symbols exceed the {MAX_PRECISION}-bit limit"
        )
    return min(needed, MAX_PRECISION)
