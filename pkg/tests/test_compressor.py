"""Tests for archive building, ratio accounting and the Compressor."""

import numpy as np
import pytest

from riq.core.compressor import (
    BASELINE_BITS,
    build_archive,
    compression_ratio,
    decode_archive,
    estimate_bits,
    estimate_ratio,
    layer_stats,
    reconstruct_model,
)
from riq.core.forward import cosine_deviation
from riq.core.pipeline import Compressor, resolve_calibration
from riq.core.quantizer import dequantize, quantize_model
from riq.core.synth import conv_arch, synth_model
from riq.errors import (
    ManifestMismatchError,
    MismatchError,
    ShapeMismatchError,
    UnknownLayerError,
)
from riq.models.calibration import CalibrationSet
from riq.models.enums import CalibSource, Eps0Policy
from riq.models.quantized import QuantConfig, QuantizedLayer, QuantizedModel
from riq.storage.archive import archive_from_bytes, archive_to_bytes
from riq.storage.calibration import save_calibration


@pytest.fixture
def toy_q(toy_model):
    return quantize_model(toy_model, QuantConfig(k=20))


class TestEstimate:
    """Tests for the entropy-formula size estimate."""

    def test_estimate_formula(self, toy_q):
        """Test ratio = 32 N / (sum n H + sum |T|)."""
        entropy_bits, table_bits = estimate_bits(toy_q)
        expected = BASELINE_BITS * toy_q.total_symbols / (entropy_bits + table_bits)
        assert estimate_ratio(toy_q) == pytest.approx(expected)
        assert table_bits > 0

    def test_ratio_grows_as_k_shrinks(self, desk_model):
        """Test coarser bins compress better."""
        ratios = [
            estimate_ratio(quantize_model(desk_model, QuantConfig(k=k))) for k in (30, 300, 3000)
        ]
        assert ratios[0] > ratios[1] > ratios[2]

    def test_empty_model(self):
        """Test estimating an empty model."""
        with pytest.raises(MismatchError):
            estimate_ratio(QuantizedModel(layers=[]))


class TestArchiveBuild:
    """Tests for build_archive, decode_archive and reconstruct_model."""

    def test_symbols_roundtrip(self, toy_model, toy_q):
        """Test decoding an archive restores every symbol and width."""
        archive = build_archive(toy_q, toy_model)
        decoded = decode_archive(archive_from_bytes(archive_to_bytes(archive)))
        for a, b in zip(decoded.layers, toy_q.layers):
            assert a.name == b.name
            assert a.delta == b.delta
            assert np.array_equal(a.symbols, b.symbols)

    def test_reconstruct_matches_dequantize(self, toy_model, toy_q):
        """Test the decoded model equals the dequantized model bit for bit."""
        archive = archive_from_bytes(archive_to_bytes(build_archive(toy_q, toy_model)))
        rebuilt = reconstruct_model(archive)
        expected = dequantize(toy_q, toy_model)
        for a, b in zip(rebuilt.weights, expected.weights):
            assert np.array_equal(a, b)
        for a, b in zip(rebuilt.biases, toy_model.biases):
            assert np.array_equal(a, b)

    def test_biases_survive(self, toy_model, toy_q, rng):
        """Test non-zero biases are stored raw and restored exactly."""
        model = toy_model.with_weights(list(toy_model.weights))
        model.biases = [rng.normal(size=b.size).astype(np.float32) for b in model.biases]
        archive = archive_from_bytes(archive_to_bytes(build_archive(toy_q, model)))
        rebuilt = reconstruct_model(archive)
        for a, b in zip(rebuilt.biases, model.biases):
            assert np.array_equal(a, b)

    def test_partial_decode(self, toy_model, toy_q):
        """Test decoding one named layer."""
        archive = build_archive(toy_q, toy_model)
        rebuilt = reconstruct_model(archive, ["fc2"])
        assert rebuilt.layer_names == ["fc2"]
        assert rebuilt.input_shape is None
        assert np.array_equal(rebuilt.weights[0], toy_q.layer("fc2").reconstruct(np.float32))

    def test_unknown_layer(self, toy_model, toy_q):
        """Test asking for a layer the archive does not hold."""
        archive = build_archive(toy_q, toy_model)
        with pytest.raises(UnknownLayerError) as exc:
            decode_archive(archive, ["fc9"])
        assert exc.value.available == ["fc1", "fc2"]

    def test_reconstruct_needs_manifest(self, toy_q):
        """Test an archive without a manifest only decodes to symbols."""
        archive = build_archive(toy_q)
        assert decode_archive(archive).layer_names == ["fc1", "fc2"]
        with pytest.raises(ManifestMismatchError):
            reconstruct_model(archive)

    def test_conv_model(self):
        """Test conv layers keep their shape and input shape through an archive."""
        arch, input_shape = conv_arch(1, [4], kernel=3, spatial=6, classes=3)
        model = synth_model(2, arch, input_shape=input_shape)
        qmodel = quantize_model(model, QuantConfig(k=10))
        rebuilt = reconstruct_model(build_archive(qmodel, model))
        assert rebuilt.layers[0].shape == [4, 1, 3, 3]
        assert rebuilt.input_shape == (1, 6, 6)

    def test_source_mismatch(self, toy_q):
        """Test pairing a quantized model with a different source model."""
        other = synth_model(0, conv_arch(1, [2], 3, 5, 2)[0], input_shape=(1, 5, 5))
        with pytest.raises(MismatchError):
            build_archive(toy_q, other)


class TestCompressionRatio:
    """Tests for measured compression ratios."""

    def test_estimate_tracks_actual(self, desk_model):
        """Test the estimate is within 2% of the measured ratio."""
        qmodel = quantize_model(desk_model, QuantConfig(k=200))
        report = compression_ratio(qmodel, build_archive(qmodel, desk_model))
        assert report.relative_gap <= 0.02
        assert report.actual_ratio > 1
        assert report.bits_per_weight == pytest.approx(32.0 / report.actual_ratio)
        assert report.inverse_ratio == pytest.approx(1.0 / report.actual_ratio)

    def test_actual_ratio_ignores_extras(self, toy_model, toy_q):
        """Test raw extras do not change the measured ratio."""
        with_extras = compression_ratio(toy_q, build_archive(toy_q, toy_model))
        without = compression_ratio(toy_q, build_archive(toy_q))
        assert with_extras.actual_ratio == without.actual_ratio
        assert with_extras.extras_bytes > without.extras_bytes

    def test_layer_mismatch(self, toy_model, toy_q):
        """Test an archive from different layers."""
        archive = build_archive(toy_q, toy_model)
        other = QuantizedModel(
            layers=[QuantizedLayer(name="x", delta=1.0, symbols=np.zeros(4, dtype=np.int64))]
        )
        with pytest.raises(MismatchError):
            compression_ratio(other, archive)


class TestLayerStats:
    """Tests for per-layer statistics."""

    def test_rows(self, toy_model, toy_q):
        """Test one row per layer with consistent values."""
        archive = build_archive(toy_q, toy_model)
        rows = layer_stats(toy_model, toy_q, archive)
        assert [row.layer for row in rows] == ["fc1", "fc2"]
        for row, layer in zip(rows, toy_q.layers):
            assert row.n == layer.n
            assert row.delta == layer.delta
            assert 0 <= row.eps <= 2
            assert row.stream_bytes == len(archive.record(layer.name).stream)
            assert row.alphabet_size >= 1

    def test_without_archive(self, toy_model, toy_q):
        """Test coder columns stay empty without an archive."""
        rows = layer_stats(toy_model, toy_q)
        assert all(row.stream_bytes == 0 for row in rows)


class TestCompressor:
    """Tests for the Compressor facade."""

    def test_deviation_mode(self, desk_model, desk_calib, tmp_path):
        """Test compress, save and decompress close the loop."""
        compressor = Compressor()
        result = compressor.compress(desk_model, desk_calib, deviation=0.005)
        assert result.satisfied
        assert result.deviation.mean_deviation <= 0.005

        path = compressor.save(result, tmp_path / "desk.rqz")
        restored = Compressor.decompress(path)
        report = cosine_deviation(desk_model, restored, desk_calib)
        assert report.mean_deviation == pytest.approx(result.deviation.mean_deviation, abs=1e-12)

    def test_rate_mode(self, desk_model, desk_calib):
        """Test a target ratio is met by the estimate."""
        result = Compressor().compress(desk_model, desk_calib, target_ratio=8.0)
        assert result.satisfied
        assert result.trace.chosen.est_ratio >= 8.0

    def test_needs_one_target(self, toy_model, toy_calib):
        """Test exactly one of deviation and target ratio."""
        with pytest.raises(ValueError):
            Compressor().compress(toy_model, toy_calib)
        with pytest.raises(ValueError):
            Compressor().compress(toy_model, toy_calib, deviation=0.1, target_ratio=4.0)

    def test_report(self, desk_model, desk_calib):
        """Test the JSON report mirrors the result."""
        compressor = Compressor(eps0_policy="constant")
        result = compressor.compress(desk_model, desk_calib, deviation=0.01)
        report = compressor.report(result, desk_calib)
        assert report.mode == "deviation"
        assert report.deviation_budget == 0.01
        assert report.target_ratio is None
        assert report.chosen_k == result.trace.chosen_k
        assert report.k_min < report.chosen_k <= report.k_max
        assert report.calibration.source == "gaussian"
        assert report.calibration.count == 8
        assert len(report.layers) == 5

    def test_config_resolution(self, monkeypatch):
        """Test unset options come from the environment, then defaults."""
        monkeypatch.setenv("RIQ_EPS0", "0.02")
        compressor = Compressor(stop_threshold=5.0)
        assert compressor.eps0 == 0.02
        assert compressor.stop_threshold == 5.0
        assert compressor.eps0_policy == Eps0Policy.CONSTANT
        assert compressor.precision == 12


class TestResolveCalibration:
    """Tests for resolve_calibration."""

    def test_gaussian_default(self, toy_model):
        """Test Gaussian samples shaped like the model input."""
        calib = resolve_calibration(toy_model, count=3, seed=1)
        assert calib.samples.shape == (3, 8)
        assert calib.source == CalibSource.GAUSSIAN

    def test_from_file(self, toy_model, tmp_path):
        """Test a calibration file wins over the Gaussian default."""
        path = save_calibration(CalibrationSet.gaussian((8,), count=2, seed=9), tmp_path / "c.bin")
        calib = resolve_calibration(toy_model, path)
        assert calib.count == 2
        assert calib.source == CalibSource.FILE

    def test_unknown_input_shape(self):
        """Test conv-first models need an explicit input shape for Gaussian samples."""
        arch, _ = conv_arch(1, [2], 3, 5, 2)
        model = synth_model(0, arch)
        with pytest.raises(ShapeMismatchError):
            resolve_calibration(model)
