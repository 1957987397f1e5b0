"""Tests for data models."""

import numpy as np
import pytest
from pydantic import ValidationError

from riq.errors import EmptyArchError, EmptyInputError, ManifestMismatchError, NonFiniteWeightError
from riq.models.calibration import CalibrationSet, DeviationReport
from riq.models.enums import Activation, CalibSource, Eps0Policy, LayerKind
from riq.models.network import LayerSpec, Model, ModelManifest
from riq.models.quantized import QuantConfig, QuantizedLayer, QuantizedModel


def dense(name: str, out_features: int, in_features: int, bias: int = 0) -> LayerSpec:
    return LayerSpec(name=name, shape=[out_features, in_features], bias_count=bias)


class TestLayerSpec:
    """Tests for LayerSpec."""

    def test_dense_defaults(self):
        """Test a dense layer gets ReLU and derived sizes."""
        spec = dense("fc1", 4, 3)
        assert spec.kind == LayerKind.DENSE
        assert spec.activation == Activation.RELU
        assert spec.n == 12
        assert spec.fan_in == 3
        assert spec.out_features == 4
        assert spec.weight_count == 12

    def test_conv_sizes(self):
        """Test conv2d layers use out_ch x in_ch x kh x kw."""
        spec = LayerSpec(name="conv1", kind=LayerKind.CONV2D, shape=[8, 2, 3, 3])
        assert spec.n == 144
        assert spec.fan_in == 18

    def test_wrong_arity_rejected(self):
        """Test a dense layer with a 4-entry shape is rejected."""
        with pytest.raises(ValidationError):
            LayerSpec(name="fc", shape=[2, 2, 2, 2])

    def test_non_positive_dimension_rejected(self):
        """Test zero dimensions are rejected."""
        with pytest.raises(ValidationError):
            LayerSpec(name="fc", shape=[0, 3])

    def test_weight_count_must_match_shape(self):
        """Test a declared weight_count must equal the shape product."""
        with pytest.raises(ValidationError):
            LayerSpec(name="fc", shape=[2, 3], weight_count=7)


class TestModelManifest:
    """Tests for ModelManifest."""

    def test_blob_size(self):
        """Test the expected blob size counts weights and biases."""
        manifest = ModelManifest(layers=[dense("a", 2, 3, bias=2), dense("b", 1, 2)])
        assert manifest.blob_size == 4 * (6 + 2 + 2)

    def test_duplicate_names_rejected(self):
        """Test layer names must be unique."""
        with pytest.raises(ValidationError):
            ModelManifest(layers=[dense("a", 2, 3), dense("a", 1, 2)])

    def test_unknown_version_rejected(self):
        """Test only version 1 manifests are accepted."""
        with pytest.raises(ValidationError):
            ModelManifest(version=2, layers=[dense("a", 2, 3)])


class TestModel:
    """Tests for Model."""

    def test_empty_arch(self):
        """Test a model needs at least one layer."""
        with pytest.raises(EmptyArchError):
            Model(layers=[], weights=[])

    def test_weight_count_mismatch(self):
        """Test weights must match the declared layer size."""
        with pytest.raises(ManifestMismatchError):
            Model(layers=[dense("a", 2, 3)], weights=[np.zeros(5)])

    def test_bias_count_mismatch(self):
        """Test biases must match bias_count."""
        with pytest.raises(ManifestMismatchError):
            Model(layers=[dense("a", 2, 3, bias=2)], weights=[np.zeros(6)], biases=[np.zeros(3)])

    def test_non_finite_weight(self):
        """Test NaN weights are rejected with the layer name."""
        w = np.ones(6)
        w[2] = np.nan
        with pytest.raises(NonFiniteWeightError) as exc:
            Model(layers=[dense("bad", 2, 3)], weights=[w])
        assert exc.value.layer == "bad"
        assert exc.value.count == 1

    def test_default_biases_and_storage(self):
        """Test default zero biases and read-only float32 storage."""
        model = Model(layers=[dense("a", 2, 3, bias=2)], weights=[np.arange(6.0)])
        assert model.biases[0].tolist() == [0.0, 0.0]
        assert model.weights[0].dtype == np.float32
        assert not model.weights[0].flags.writeable
        assert model.weight_tensor(0).shape == (2, 3)

    def test_resolved_input_shape(self):
        """Test dense-first models derive their input shape."""
        model = Model(layers=[dense("a", 2, 3)], weights=[np.zeros(6)])
        assert model.resolved_input_shape() == (3,)

    def test_with_weights_keeps_biases(self):
        """Test with_weights replaces weights only."""
        model = Model(
            layers=[dense("a", 2, 3, bias=2)], weights=[np.ones(6)], biases=[np.array([1, 2])]
        )
        other = model.with_weights([np.zeros(6)])
        assert other.weights[0].tolist() == [0.0] * 6
        assert other.biases[0].tolist() == [1.0, 2.0]
        assert model.weights[0].tolist() == [1.0] * 6

    def test_manifest_roundtrip(self, toy_model):
        """Test a model's manifest describes its layers."""
        manifest = toy_model.manifest()
        assert [layer.name for layer in manifest.layers] == toy_model.layer_names
        assert manifest.blob_size == 4 * sum(
            layer.n + layer.bias_count for layer in toy_model.layers
        )


class TestQuantConfig:
    """Tests for QuantConfig."""

    def test_defaults(self):
        """Test default floor and policy."""
        config = QuantConfig(k=10)
        assert config.eps0 == 0.01
        assert config.eps0_policy == Eps0Policy.CONSTANT

    def test_k_must_be_positive(self):
        """Test k <= 0 is rejected."""
        with pytest.raises(ValidationError):
            QuantConfig(k=0)

    def test_eps0_range(self):
        """Test eps0 outside [0, 1) is rejected."""
        with pytest.raises(ValidationError):
            QuantConfig(k=1, eps0=1.0)

    def test_with_k_copies(self):
        """Test with_k returns a new config."""
        config = QuantConfig(k=10, eps0=0.02)
        other = config.with_k(20)
        assert other.k == 20
        assert other.eps0 == 0.02
        assert config.k == 10


class TestQuantized:
    """Tests for QuantizedLayer and QuantizedModel."""

    def test_reconstruct(self):
        """Test reconstruction is symbols times delta."""
        layer = QuantizedLayer(name="a", delta=0.5, symbols=np.array([-2, 0, 3]))
        assert layer.reconstruct().tolist() == [-1.0, 0.0, 1.5]
        assert layer.reconstruct(np.float32).dtype == np.float32
        assert (layer.min_symbol, layer.max_symbol) == (-2, 3)

    def test_model_accessors(self):
        """Test QuantizedModel summaries."""
        qmodel = QuantizedModel(
            layers=[
                QuantizedLayer(name="a", delta=1.0, symbols=np.zeros(3, dtype=np.int64)),
                QuantizedLayer(
                    name="b", delta=1.0, symbols=np.zeros(2, dtype=np.int64), degenerate=True
                ),
            ]
        )
        assert qmodel.total_symbols == 5
        assert qmodel.degenerate_layers == ["b"]
        assert qmodel.layer("a").n == 3
        with pytest.raises(KeyError):
            qmodel.layer("c")


class TestCalibration:
    """Tests for CalibrationSet and DeviationReport."""

    def test_gaussian_is_seeded(self):
        """Test the same seed gives identical samples."""
        a = CalibrationSet.gaussian((5,), count=3, seed=7)
        b = CalibrationSet.gaussian((5,), count=3, seed=7)
        assert np.array_equal(a.samples, b.samples)
        assert a.count == 3
        assert a.sample_shape == (5,)
        assert a.source == CalibSource.GAUSSIAN

    def test_empty_rejected(self):
        """Test a calibration set needs samples."""
        with pytest.raises(EmptyInputError):
            CalibrationSet(samples=np.zeros((0, 3)))
        with pytest.raises(EmptyInputError):
            CalibrationSet.gaussian((3,), count=0)

    def test_non_finite_rejected(self):
        """Test NaN samples are rejected."""
        with pytest.raises(ValueError):
            CalibrationSet(samples=np.array([[1.0, np.inf]]))

    def test_report_statistics(self):
        """Test mean and max deviation."""
        report = DeviationReport(per_sample=[0.1, 0.3])
        assert report.mean_deviation == pytest.approx(0.2)
        assert report.max_deviation == pytest.approx(0.3)
