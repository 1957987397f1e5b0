"""Uniform scalar quantization and RIQ bin widths.

The RIQ bin width of a layer is proportional to its norm,

    delta_l(k) = ||w_l|| * (1/k + eps0 * sqrt(24 / n_l)),

so a single scalar k sets every layer's width and the width does not depend
on the orientation of w_l.
"""

from __future__ import annotations

import logging
import math

import numpy as np

from ..errors import (
    DegenerateRangeError,
    EmptyInputError,
    MismatchError,
    NonPositiveDeltaError,
    RiqError,
    TooFewSamplesError,
    ZeroNormLayerError,
    attach_layer,
)
from ..models.enums import Eps0Policy
from ..models.network import Model
from ..models.quantized import QuantConfig, QuantizedLayer, QuantizedModel

logger = logging.getLogger(__name__)

SENTINEL_DELTA = 1.0


def _as_f64(w: np.ndarray) -> np.ndarray:
    return np.asarray(w, dtype=np.float64).reshape(-1)


def quantize_uniform(w: np.ndarray, delta: float, name: str = "") -> QuantizedLayer:
    """Round ``w / delta`` half-to-even to integer symbols."""
    if not delta > 0 or not math.isfinite(delta):
        raise NonPositiveDeltaError(f"Bin width must be positive and finite, got {delta}")
    symbols = np.rint(_as_f64(w) / delta).astype(np.int64)
    return QuantizedLayer(name=name, delta=float(delta), symbols=symbols)


def range_step(w: np.ndarray, bits: int) -> float:
    """Range-based R-bit step ``(max(w) - min(w)) / (2^R - 1)``."""
    if bits < 1:
        raise ValueError(f"Invalid bit width: {bits}. Must be >= 1")
    w = _as_f64(w)
    if w.size == 0:
        raise EmptyInputError("Cannot take the range of an empty vector")
    spread = float(w.max() - w.min())
    if spread <= 0:
        raise DegenerateRangeError("Layer weights are constant; the range is zero")
    return spread / (2**bits - 1)


def eps0_rbit(w: np.ndarray, n: int, bits: int) -> float:
    """Per-layer floor that makes the k -> infinity width equal the R-bit range step."""
    step = range_step(w, bits)
    norm_sq = float(np.dot(_as_f64(w), _as_f64(w)))
    return step / math.sqrt(24.0 * norm_sq / n)


def eps0_fd(w: np.ndarray, n: int) -> float:
    """Freedman-Diaconis floor ``2 * IQR(w) / n^(1/3)`` (linear-interpolation quantiles)."""
    if n < 4:
        raise TooFewSamplesError(f"The Freedman-Diaconis rule needs n >= 4, got {n}")
    q75, q25 = np.percentile(_as_f64(w), [75, 25])
    return float(2.0 * (q75 - q25) / np.cbrt(n))


def resolve_eps0(w: np.ndarray, n: int, config: QuantConfig) -> float:
    """The floor term a layer gets under ``config.eps0_policy``."""
    if config.eps0_policy == Eps0Policy.PER_LAYER_RBIT:
        return eps0_rbit(w, n, config.rbits)
    if config.eps0_policy == Eps0Policy.PER_LAYER_FD:
        return eps0_fd(w, n)
    return config.eps0


def delta_for_layer(w: np.ndarray, n: int, config: QuantConfig) -> float:
    """RIQ bin width of one layer under ``config``."""
    norm = float(np.linalg.norm(_as_f64(w)))
    if norm == 0.0:
        raise ZeroNormLayerError("Bin width is undefined for a zero-norm layer")
    eps0 = resolve_eps0(w, n, config)
    delta = norm * (1.0 / config.k + eps0 * math.sqrt(24.0 / n))
    if not delta > 0 or not math.isfinite(delta):
        raise NonPositiveDeltaError(
            f"k={config.k} with eps0={eps0} gives a bin width of {delta}"
        )
    return delta


def delta_from_distortion(eps: float, norm: float, n: int) -> float:
    """Bin width whose expected cosine distortion is ``eps``: sqrt(eps)*norm*sqrt(24/n)."""
    if eps <= 0 or norm <= 0:
        raise ValueError("Distortion and norm must be positive")
    return math.sqrt(eps) * norm * math.sqrt(24.0 / n)


def distortion_from_delta(delta: float, norm: float, n: int) -> float:
    """Inverse of ``delta_from_distortion``: n * delta^2 / (24 * norm^2)."""
    if norm <= 0:
        raise ValueError("Norm must be positive")
    return n * delta * delta / (24.0 * norm * norm)


def delta_from_sqnr(eps_prime: float, norm: float, n: int) -> float:
    """Bin width for a relative error ||w - w_hat|| / ||w|| of ``eps_prime``."""
    if eps_prime <= 0 or norm <= 0:
        raise ValueError("Relative error and norm must be positive")
    return eps_prime * norm * math.sqrt(12.0 / n)


def layer_rate(w: np.ndarray, delta: float) -> float:
    """Quantization rate ``log2((max - min) / delta)`` in bits/symbol (may be fractional)."""
    if not delta > 0:
        raise NonPositiveDeltaError(f"Bin width must be positive, got {delta}")
    w = _as_f64(w)
    spread = float(w.max() - w.min()) if w.size else 0.0
    if spread <= 0:
        raise DegenerateRangeError("Layer weights are constant; the rate is undefined")
    return math.log2(spread / delta)


def symbol_histogram(symbols: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Sorted distinct symbols and their counts."""
    return np.unique(np.asarray(symbols, dtype=np.int64), return_counts=True)


def empirical_entropy(symbols: np.ndarray) -> float:
    """Shannon entropy of the symbol histogram in bits/symbol."""
    symbols = np.asarray(symbols)
    if symbols.size == 0:
        raise EmptyInputError("Entropy of an empty symbol stream is undefined")
    _, counts = symbol_histogram(symbols)
    p = counts / counts.sum()
    return float(max(0.0, -np.sum(p * np.log2(p))))


def _sentinel_layer(name: str, n: int) -> QuantizedLayer:
    return QuantizedLayer(
        name=name, delta=SENTINEL_DELTA, symbols=np.zeros(n, dtype=np.int64), degenerate=True
    )


def quantize_model(model: Model, config: QuantConfig) -> QuantizedModel:
    """Quantize every layer with its RIQ bin width.

    Zero-norm layers get all-zero symbols with the delta=1 sentinel and are
    flagged ``degenerate``. Other layer failures propagate with the layer name
    attached.
    """
    layers = []
    for spec, w in zip(model.layers, model.weights):
        try:
            delta = delta_for_layer(w, spec.n, config)
        except ZeroNormLayerError:
            logger.warning("Layer '%s' has zero norm; using the sentinel bin width", spec.name)
            layers.append(_sentinel_layer(spec.name, spec.n))
            continue
        except RiqError as e:
            raise attach_layer(e, spec.name) from e
        layers.append(quantize_uniform(w, delta, name=spec.name))
    return QuantizedModel(layers=layers, config=config, source=list(model.layers))


def quantize_with_deltas(model: Model, deltas: list[float]) -> QuantizedModel:
    """Quantize each layer with an explicitly given bin width."""
    if len(deltas) != model.num_layers:
        raise ValueError(f"Expected {model.num_layers} bin widths, got {len(deltas)}")
    layers = []
    for spec, w, delta in zip(model.layers, model.weights, deltas):
        try:
            layers.append(quantize_uniform(w, delta, name=spec.name))
        except RiqError as e:
            raise attach_layer(e, spec.name) from e
    return QuantizedModel(layers=layers, config=None, source=list(model.layers))


def dequantize(qmodel: QuantizedModel, model: Model) -> Model:
    """Model with float32 weights ``symbols * delta`` and ``model``'s biases.

    This is the nominal fp32 representation an archive decodes to.
    """
    if qmodel.layer_names != model.layer_names:
        raise MismatchError("Quantized model does not match the source model's layers")
    return model.with_weights([layer.reconstruct(np.float32) for layer in qmodel.layers])
