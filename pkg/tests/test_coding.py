"""Tests for frequency tables and the rANS coder."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from riq.coding import rans
from riq.coding.table import (
    MAX_PRECISION,
    FrequencyTable,
    build_table,
    normalize_counts,
    precision_for,
    read_varint,
    unzigzag,
    write_varint,
    zigzag,
)
from riq.errors import (
    AlphabetTooLargeError,
    CorruptStreamError,
    EmptyInputError,
    SymbolNotInTableError,
)

symbol_lists = st.lists(st.integers(min_value=-300, max_value=300), min_size=1, max_size=400)


class TestNormalize:
    """Tests for count normalization."""

    def test_exact_split(self):
        """Test counts that already divide 2^precision."""
        assert normalize_counts(np.array([1, 3]), 2).tolist() == [1, 3]
        assert normalize_counts(np.array([1, 1]), 12).tolist() == [2048, 2048]

    def test_rare_symbols_keep_a_slot(self):
        """Test every observed symbol gets frequency >= 1."""
        scaled = normalize_counts(np.array([1, 1, 100000]), 4)
        assert scaled.sum() == 16
        assert scaled.min() >= 1

    def test_too_many_symbols(self):
        """Test alphabets larger than 2^precision."""
        with pytest.raises(AlphabetTooLargeError):
            normalize_counts(np.ones(5, dtype=np.int64), 2)

    @given(st.lists(st.integers(min_value=1, max_value=10**6), min_size=1, max_size=64))
    def test_sums_to_target(self, counts):
        """Test scaled counts always sum to 2^precision and stay positive."""
        scaled = normalize_counts(np.array(counts), 12)
        assert int(scaled.sum()) == 4096
        assert scaled.min() >= 1


class TestTable:
    """Tests for FrequencyTable."""

    def test_build(self):
        """Test alphabet and counts of a small stream."""
        table = build_table(np.array([3, -1, 3, 3]), precision=4)
        assert table.alphabet.tolist() == [-1, 3]
        assert table.counts.tolist() == [1, 3]
        assert table.scaled.tolist() == [4, 12]
        assert table.cumulative.tolist() == [0, 4]
        assert table.size == 2
        assert table.total == 4

    def test_empty(self):
        """Test an empty stream has no table."""
        with pytest.raises(EmptyInputError):
            build_table(np.array([], dtype=np.int64))

    def test_invalid_precision(self):
        """Test precision outside [1, 15]."""
        with pytest.raises(ValueError):
            build_table(np.array([1]), precision=16)

    def test_index_of_unknown(self):
        """Test a symbol outside the alphabet."""
        table = build_table(np.array([0, 1, 2]))
        with pytest.raises(SymbolNotInTableError):
            table.index_of(np.array([5]))

    def test_bytes_roundtrip(self):
        """Test serialization restores alphabet, precision and frequencies."""
        table = build_table(np.array([-7, 0, 0, 2, 2, 2, 900]), precision=10)
        data = table.to_bytes()
        parsed, offset = FrequencyTable.from_bytes(data + b"tail")
        assert offset == len(data)
        assert parsed.alphabet.tolist() == [-7, 0, 2, 900]
        assert parsed.precision == 10
        assert np.array_equal(parsed.scaled, table.scaled)
        assert table.serialized_bits == 8 * len(data)

    def test_from_bytes_rejects_bad_sum(self):
        """Test frequencies that do not sum to 2^precision."""
        data = bytearray(build_table(np.array([0, 1]), precision=4).to_bytes())
        data[-1] ^= 0x01
        with pytest.raises(CorruptStreamError):
            FrequencyTable.from_bytes(bytes(data))

    def test_from_bytes_truncated(self):
        """Test a table cut short."""
        data = build_table(np.array([0, 1]), precision=4).to_bytes()
        with pytest.raises(CorruptStreamError):
            FrequencyTable.from_bytes(data[:-1])

    def test_entropy_of_exact_table(self):
        """Test model entropy equals Shannon entropy when frequencies are exact."""
        table = build_table(np.array([0, 1, 1, 1]), precision=2)
        expected = -(0.25 * np.log2(0.25) + 0.75 * np.log2(0.75))
        assert table.entropy() == pytest.approx(expected)

    @pytest.mark.parametrize(
        ("size", "expected"), [(1, 12), (1000, 12), (2048, 13), (4096, 14), (20000, 15)]
    )
    def test_precision_for(self, size, expected):
        """Test precision grows with the alphabet."""
        assert precision_for(size) == expected

    def test_precision_for_too_large(self):
        """Test alphabets beyond the 15-bit limit."""
        with pytest.raises(AlphabetTooLargeError):
            precision_for((1 << MAX_PRECISION) + 1)


class TestVarint:
    """Tests for the varint and zig-zag helpers."""

    @given(st.integers(min_value=-(2**40), max_value=2**40))
    def test_zigzag_inverse(self, value):
        """Test zig-zag maps back to the same integer."""
        assert zigzag(value) >= 0
        assert unzigzag(zigzag(value)) == value

    def test_varint(self):
        """Test multi-byte varints."""
        out = bytearray()
        write_varint(out, 300)
        assert bytes(out) == b"\xac\x02"
        assert read_varint(bytes(out), 0) == (300, 2)

    def test_varint_truncated(self):
        """Test a varint missing its last byte."""
        with pytest.raises(CorruptStreamError):
            read_varint(b"\x80", 0)


class TestRans:
    """Tests for rANS encode/decode."""

    @given(symbol_lists)
    @settings(max_examples=60, deadline=None)
    def test_roundtrip(self, symbols):
        """Test decode(encode(s)) == s for arbitrary integer streams."""
        arr = np.array(symbols, dtype=np.int64)
        table = build_table(arr, precision_for(np.unique(arr).size))
        stream = rans.encode(arr, table)
        assert rans.decode(stream, table, arr.size).tolist() == symbols

    def test_single_symbol_stream(self):
        """Test a one-symbol alphabet codes to just the final state."""
        arr = np.zeros(1000, dtype=np.int64)
        table = build_table(arr)
        stream = rans.encode(arr, table)
        assert len(stream) == rans.STATE_BYTES
        assert rans.decode(stream, table, 1000).tolist() == [0] * 1000

    def test_size_near_entropy(self, rng):
        """Test the stream is within a few percent of the entropy bound."""
        arr = np.rint(rng.normal(scale=4.0, size=20000)).astype(np.int64)
        table = build_table(arr)
        stream = rans.encode(arr, table)
        _, counts = np.unique(arr, return_counts=True)
        p = counts / counts.sum()
        bound = -np.sum(p * np.log2(p)) * arr.size / 8
        assert len(stream) <= bound * 1.02 + 16

    def test_decode_is_exact_inverse(self, rng):
        """Test Gaussian-rounded symbols decode exactly."""
        arr = np.rint(rng.normal(scale=30.0, size=5000)).astype(np.int64)
        table = build_table(arr, precision_for(np.unique(arr).size))
        assert np.array_equal(rans.decode(rans.encode(arr, table), table, arr.size), arr)

    def test_truncated_stream(self, rng):
        """Test a stream missing its tail."""
        arr = rng.integers(0, 16, size=500)
        table = build_table(arr)
        stream = rans.encode(arr, table)
        with pytest.raises(CorruptStreamError):
            rans.decode(stream[:-3], table, arr.size)

    def test_too_short(self):
        """Test a stream shorter than the state."""
        table = build_table(np.array([0, 1]))
        with pytest.raises(CorruptStreamError):
            rans.decode(b"\x00\x01", table, 2)

    def test_wrong_count(self, rng):
        """Test decoding fewer symbols than were encoded."""
        arr = rng.integers(0, 8, size=300)
        table = build_table(arr)
        stream = rans.encode(arr, table)
        with pytest.raises(CorruptStreamError):
            rans.decode(stream, table, arr.size - 50)

    def test_bits_per_symbol(self):
        """Test the stream rate helper."""
        assert rans.bits_per_symbol(b"\x00" * 4, 16) == 2.0
        assert rans.bits_per_symbol(b"", 0) == 0.0
