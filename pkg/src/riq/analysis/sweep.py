"""Rate-distortion sweeps over k."""

from __future__ import annotations

import logging
from collections.abc import Sequence

import numpy as np

from ..coding.table import DEFAULT_PRECISION
from ..core.compressor import build_archive, compression_ratio, estimate_ratio
from ..core.forward import DeviationMeter
from ..core.quantizer import dequantize, empirical_entropy, layer_rate, quantize_model
from ..core.search import SearchBounds, k_bounds
from ..errors import DegenerateRangeError, InvalidGridError
from ..models.calibration import CalibrationSet
from ..models.enums import Eps0Policy
from ..models.network import Model
from ..models.quantized import DEFAULT_EPS0, QuantConfig
from .results import SweepPoint

logger = logging.getLogger(__name__)

DEFAULT_GRID_POINTS = 16


def log_grid(low: float, high: float, points: int) -> list[float]:
    """``points`` log-spaced values from ``low`` to ``high`` inclusive."""
    if points < 1:
        raise InvalidGridError(f"A grid needs at least one point, got {points}")
    if not 0 < low <= high:
        raise InvalidGridError(f"Invalid grid range {low}..{high}")
    if points == 1:
        return [float(low)]
    return [float(k) for k in np.geomspace(low, high, points)]


def default_grid(
    bounds: SearchBounds, points: int = DEFAULT_GRID_POINTS, upper_half: bool = False
) -> list[float]:
    """Log-spaced grid over the k bounds.

    ``upper_half`` starts at the geometric midpoint sqrt(k_min * k_max), the
    high-rate half used for the 1/k^2 fit.
    """
    low = float(np.sqrt(bounds.k_min * bounds.k_max)) if upper_half else bounds.k_min
    return log_grid(low, bounds.k_max, points)


def parse_grid(text: str) -> list[float]:
    """Parse ``lo:hi:n`` into a log-spaced grid."""
    parts = text.split(":")
    if len(parts) != 3:
        raise InvalidGridError(f"Grid must be lo:hi:n, got '{text}'")
    try:
        low, high, points = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as e:
        raise InvalidGridError(f"Grid must be lo:hi:n, got '{text}'") from e
    return log_grid(low, high, points)


def grid_bounds(model: Model, eps0: float) -> SearchBounds:
    """Bounds a sweep grid is checked against; eps0 = 0 borrows the default floor's bounds."""
    return k_bounds(model, eps0 if eps0 > 0 else DEFAULT_EPS0)


def _check_grid(k_grid: Sequence[float], bounds: SearchBounds) -> None:
    if len(k_grid) == 0:
        raise InvalidGridError("The k grid is empty")
    if any(b <= a for a, b in zip(k_grid, k_grid[1:])):
        raise InvalidGridError("The k grid must be strictly ascending")
    outside = [k for k in k_grid if not bounds.contains(k)]
    if outside:
        raise InvalidGridError(
            f"k={outside[0]:.4f} lies outside [{bounds.k_min:.4f}, {bounds.k_max:.4f}]"
        )


def sweep(
    model: Model,
    calib: CalibrationSet,
    k_grid: Sequence[float],
    eps0: float = DEFAULT_EPS0,
    *,
    bounds: SearchBounds | None = None,
    policy: Eps0Policy = Eps0Policy.CONSTANT,
    precision: int = DEFAULT_PRECISION,
) -> list[SweepPoint]:
    """Quantize, measure and entropy-code the model at every k of the grid."""
    _check_grid(k_grid, bounds or grid_bounds(model, eps0))
    meter = DeviationMeter(model, calib)
    points = []
    for k in k_grid:
        qmodel = quantize_model(model, QuantConfig(k=k, eps0=eps0, eps0_policy=policy))
        report = meter.measure(dequantize(qmodel, model))
        archive = build_archive(qmodel, precision=precision)
        rates = []
        for w, qlayer in zip(model.weights, qmodel.layers):
            try:
                rates.append(layer_rate(w, qlayer.delta))
            except DegenerateRangeError:
                rates.append(0.0)
        point = SweepPoint(
            k=float(k),
            mean_deviation=report.mean_deviation,
            est_ratio=estimate_ratio(qmodel, precision),
            actual_ratio=compression_ratio(qmodel, archive).actual_ratio,
            layers=qmodel.layer_names,
            sizes=[layer.n for layer in qmodel.layers],
            deltas=qmodel.deltas,
            eps=report.per_layer_distortion,
            rates=rates,
            entropies=[empirical_entropy(layer.symbols) for layer in qmodel.layers],
        )
        logger.debug(
            "k=%.4f deviation=%.6g entropy=%.3f", k, point.mean_deviation, point.mean_entropy
        )
        points.append(point)
    return points
