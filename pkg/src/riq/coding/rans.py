"""Byte-oriented rANS with a 32-bit state.

Symbols are pushed in reverse order and the emitted bytes reversed, so the
decoder reads the stream front to back: first the final encoder state (4
bytes, big-endian), then the renormalization bytes.
"""

from __future__ import annotations

import numpy as np

from ..errors import CorruptStreamError
from .table import FrequencyTable

RANS_L = 1 << 23  # lower bound of the normalization interval
STATE_BYTES = 4


def encode(symbols: np.ndarray, table: FrequencyTable) -> bytes:
    """Entropy-code ``symbols`` with ``table``'s scaled frequencies."""
    idx = table.index_of(symbols).tolist()
    freqs = table.scaled.tolist()
    starts = table.cumulative.tolist()
    precision = table.precision
    bound = (RANS_L >> precision) << 8

    x = RANS_L
    out = bytearray()
    for s in reversed(idx):
        freq = freqs[s]
        x_max = bound * freq
        while x >= x_max:
            out.append(x & 0xFF)
            x >>= 8
        x = ((x // freq) << precision) + (x % freq) + starts[s]
    out += x.to_bytes(STATE_BYTES, "little")
    out.reverse()
    return bytes(out)


def decode(stream: bytes, table: FrequencyTable, n: int) -> np.ndarray:
    """Decode ``n`` symbols; the exact inverse of ``encode``.

    Raises:
        CorruptStreamError: truncated stream, leftover bytes, or a final state
            that does not return to the initial one
    """
    if n < 0:
        raise ValueError(f"Invalid symbol count: {n}")
    if len(stream) < STATE_BYTES:
        raise CorruptStreamError(f"Stream of {len(stream)} bytes is shorter than the state")
    x = int.from_bytes(stream[:STATE_BYTES], "big")
    if not RANS_L <= x < RANS_L << 8:
        raise CorruptStreamError("Initial decoder state out of range")

    precision = table.precision
    mask = (1 << precision) - 1
    freqs = table.scaled.tolist()
    starts = table.cumulative.tolist()
    slot_to_symbol = np.repeat(np.arange(table.size), table.scaled).tolist()

    pos = STATE_BYTES
    size = len(stream)
    out = [0] * n
    for i in range(n):
        slot = x & mask
        s = slot_to_symbol[slot]
        x = freqs[s] * (x >> precision) + slot - starts[s]
        while x < RANS_L:
            if pos >= size:
                raise CorruptStreamError(f"Stream truncated after {i} of {n} symbols")
            x = (x << 8) | stream[pos]
            pos += 1
        out[i] = s

    if x != RANS_L or pos != size:
        raise CorruptStreamError("Decoder state desynchronized from the stream")
    return table.alphabet[np.asarray(out, dtype=np.int64)]


def bits_per_symbol(stream: bytes, n: int) -> float:
    """Stream size in bits divided by the symbol count."""
    return 8.0 * len(stream) / n if n else 0.0
