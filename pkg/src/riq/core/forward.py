"""Minimal deterministic inference engine and output-deviation measurement.

Storage is float32; every computation here runs in float64.
"""

from __future__ import annotations

import logging

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..errors import ShapeMismatchError, ZeroOutputNormError, ZeroVectorError
from ..models.calibration import CalibrationSet, DeviationReport
from ..models.enums import Activation, LayerKind
from ..models.network import Model

logger = logging.getLogger(__name__)


def _dense(h: np.ndarray, weight: np.ndarray, bias: np.ndarray, name: str) -> np.ndarray:
    batch = h.shape[0]
    flat = h.reshape(batch, -1)
    if flat.shape[1] != weight.shape[1]:
        raise ShapeMismatchError(
            f"Layer '{name}' expects {weight.shape[1]} inputs, got {flat.shape[1]}"
        )
    out = flat @ weight.T
    if bias.size:
        out = out + bias
    return out


def _conv2d(h: np.ndarray, weight: np.ndarray, bias: np.ndarray, name: str) -> np.ndarray:
    out_ch, in_ch, kh, kw = weight.shape
    if h.ndim == 3 and in_ch == 1:
        h = h[:, None, :, :]
    if h.ndim != 4 or h.shape[1] != in_ch:
        raise ShapeMismatchError(
            f"Layer '{name}' expects input (batch, {in_ch}, H, W), got {h.shape}"
        )
    if h.shape[2] < kh or h.shape[3] < kw:
        raise ShapeMismatchError(f"Layer '{name}' kernel {kh}x{kw} exceeds input {h.shape[2:]}")
    # valid cross-correlation
    windows = sliding_window_view(h, (kh, kw), axis=(2, 3))
    out = np.einsum("bchwij,ocij->bohw", windows, weight, optimize=True)
    if bias.size:
        out = out + bias[None, :, None, None]
    return out


def forward_batch(model: Model, inputs: np.ndarray) -> np.ndarray:
    """Run a batch of inputs (axis 0) through the model."""
    h = np.asarray(inputs, dtype=np.float64)
    for i, layer in enumerate(model.layers):
        weight = model.weight_tensor(i).astype(np.float64)
        bias = model.biases[i].astype(np.float64)
        if layer.kind == LayerKind.DENSE:
            h = _dense(h, weight, bias, layer.name)
        else:
            h = _conv2d(h, weight, bias, layer.name)
        if layer.activation == Activation.RELU:
            h = np.maximum(h, 0.0)
    return h


def forward(model: Model, x: np.ndarray) -> np.ndarray:
    """Evaluate f(x) for a single input."""
    x = np.asarray(x, dtype=np.float64)
    expected = model.resolved_input_shape()
    if expected is not None and x.size != int(np.prod(expected)):
        raise ShapeMismatchError(f"Model expects input shape {expected}, got {x.shape}")
    if expected is not None and len(expected) > 1:
        x = x.reshape(expected)
    return forward_batch(model, x[None, ...])[0]


def cosine_distance_rows(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Row-wise 1 - cos(a_i, b_i), computed as ||a/|a| - b/|b|||^2 / 2."""
    a_unit = a / np.linalg.norm(a, axis=1, keepdims=True)
    b_unit = b / np.linalg.norm(b, axis=1, keepdims=True)
    return 0.5 * np.sum((a_unit - b_unit) ** 2, axis=1)


def layer_distortion(w: np.ndarray, w_hat: np.ndarray) -> tuple[float, float]:
    """Cosine distance between a layer's weights and their quantized version.

    Returns:
        (epsilon, theta) with epsilon in [0, 2] and theta the angle in radians
    """
    w = np.asarray(w, dtype=np.float64).reshape(-1)
    w_hat = np.asarray(w_hat, dtype=np.float64).reshape(-1)
    if w.size != w_hat.size:
        raise ShapeMismatchError(f"Vectors differ in length: {w.size} vs {w_hat.size}")
    if not np.any(w) or not np.any(w_hat):
        raise ZeroVectorError("Distortion is undefined for a zero vector")
    eps = float(cosine_distance_rows(w[None, :], w_hat[None, :])[0])
    theta = float(2.0 * np.arcsin(min(1.0, np.sqrt(eps / 2.0))))
    return eps, theta


def _layer_terms(model: Model, qmodel: Model) -> tuple[list[float], list[float]]:
    eps_list, theta_list = [], []
    for layer, w, w_hat in zip(model.layers, model.weights, qmodel.weights):
        try:
            eps, theta = layer_distortion(w, w_hat)
        except ZeroVectorError:
            # zero on both sides is an exact reconstruction; one side zero is orthogonal
            same = not np.any(w) and not np.any(w_hat)
            eps, theta = (0.0, 0.0) if same else (1.0, float(np.pi / 2))
            logger.debug("Layer '%s' has a zero weight vector", layer.name)
        eps_list.append(eps)
        theta_list.append(theta)
    return eps_list, theta_list


def _check_same_architecture(model: Model, qmodel: Model) -> None:
    if [(s.kind, s.shape, s.activation) for s in model.layers] != [
        (s.kind, s.shape, s.activation) for s in qmodel.layers
    ]:
        raise ShapeMismatchError("Models do not share an architecture")


class DeviationMeter:
    """Caches f(x_i) over a calibration set so f_hat can be compared repeatedly.

    A quantized model that maps a sample to the zero vector scores that sample
    as orthogonal (deviation 1) unless ``strict`` is set on ``measure``.
    """

    def __init__(self, model: Model, calib: CalibrationSet):
        self.model = model
        self.calib = calib
        self.reference = self._outputs(model)
        zero = np.flatnonzero(np.linalg.norm(self.reference, axis=1) == 0.0)
        if zero.size:
            raise ZeroOutputNormError(int(zero[0]), "original")

    def _outputs(self, model: Model) -> np.ndarray:
        return forward_batch(model, self.calib.samples).reshape(self.calib.count, -1)

    def measure(
        self, qmodel: Model, per_layer: bool = True, strict: bool = False
    ) -> DeviationReport:
        """Deviation of ``qmodel`` from the cached reference outputs."""
        _check_same_architecture(self.model, qmodel)
        outputs = self._outputs(qmodel)
        zero = np.linalg.norm(outputs, axis=1) == 0.0
        if zero.any():
            if strict:
                raise ZeroOutputNormError(int(np.flatnonzero(zero)[0]), "quantized")
            logger.debug("Quantized model outputs zeros for %d sample(s)", int(zero.sum()))
        per_sample = np.ones(self.calib.count)
        live = ~zero
        if live.any():
            per_sample[live] = cosine_distance_rows(self.reference[live], outputs[live])
        report = DeviationReport(per_sample=[float(d) for d in per_sample])
        if per_layer:
            report.per_layer_distortion, report.per_layer_angle = _layer_terms(self.model, qmodel)
        return report


def cosine_deviation(model: Model, qmodel: Model, calib: CalibrationSet) -> DeviationReport:
    """Cosine deviation between f and f_hat over a calibration set.

    ``mean_deviation`` of the report is the value compared against a budget D.
    Raises ``ZeroOutputNormError`` if either model outputs the zero vector.
    """
    return DeviationMeter(model, calib).measure(qmodel, strict=True)
