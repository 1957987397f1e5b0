"""Range-based uniform quantization baseline."""

from __future__ import annotations

import logging
from collections.abc import Sequence

import numpy as np

from ..coding.table import DEFAULT_PRECISION
from ..core.compressor import BASELINE_BITS, build_archive, compression_ratio, estimate_ratio
from ..core.forward import DeviationMeter
from ..core.quantizer import dequantize, empirical_entropy, quantize_with_deltas, range_step
from ..core.search import DEFAULT_STOP_THRESHOLD, riq_search
from ..errors import AlphabetTooLargeError, DegenerateRangeError
from ..models.calibration import CalibrationSet
from ..models.network import Model
from ..models.quantized import DEFAULT_EPS0
from .results import UniformPoint

logger = logging.getLogger(__name__)

MAX_DEVIATION = 2.0


def uniform_deltas(model: Model, bits: int) -> tuple[list[float], list[str]]:
    """R-bit range steps per layer; constant layers get an exact step and are listed."""
    deltas, skipped = [], []
    for spec, w in zip(model.layers, model.weights):
        try:
            deltas.append(range_step(w, bits))
        except DegenerateRangeError:
            value = float(abs(w[0]))
            deltas.append(value if value > 0 else 1.0)
            skipped.append(spec.name)
    return deltas, skipped


def compare_uniform(
    model: Model,
    calib: CalibrationSet,
    bit_grid: Sequence[int],
    eps0: float = DEFAULT_EPS0,
    *,
    stop_threshold: float = DEFAULT_STOP_THRESHOLD,
    precision: int = DEFAULT_PRECISION,
    match_riq: bool = True,
) -> list[UniformPoint]:
    """Quantize with R-bit range steps for each R and pair each point with RIQ.

    The RIQ side is the search result for a deviation budget equal to the
    uniform point's measured deviation.
    """
    if any(bits < 1 for bits in bit_grid):
        raise ValueError(f"Bit widths must be >= 1, got {list(bit_grid)}")
    meter = DeviationMeter(model, calib)
    points = []
    for bits in bit_grid:
        deltas, skipped = uniform_deltas(model, bits)
        qmodel = quantize_with_deltas(model, deltas)
        deviation = meter.measure(dequantize(qmodel, model), per_layer=False).mean_deviation
        sizes = np.asarray([layer.n for layer in qmodel.layers], dtype=np.float64)
        entropies = [empirical_entropy(layer.symbols) for layer in qmodel.layers]
        entropy_bits = float(np.dot(sizes, entropies))
        # table-free estimate, kept when the alphabet is too large to code
        est_ratio = BASELINE_BITS * sizes.sum() / entropy_bits if entropy_bits else float("inf")
        actual_ratio: float | None = None
        try:
            est_ratio = estimate_ratio(qmodel, precision)
            archive = build_archive(qmodel, precision=precision)
            actual_ratio = compression_ratio(qmodel, archive).actual_ratio
        except AlphabetTooLargeError as e:
            logger.warning("%d-bit baseline cannot be entropy-coded: %s", bits, e)
        point = UniformPoint(
            bits=bits,
            deviation=deviation,
            mean_entropy=entropy_bits / float(sizes.sum()),
            est_ratio=est_ratio,
            actual_ratio=actual_ratio,
            skipped_layers=skipped,
        )
        if match_riq and 0.0 < deviation <= MAX_DEVIATION:
            riq_q, trace = riq_search(
                model,
                calib,
                deviation,
                eps0,
                stop_threshold,
                precision=precision,
            )
            point.riq_k = trace.chosen_k
            point.riq_deviation = trace.chosen.deviation
            point.riq_est_ratio = trace.chosen.est_ratio
            point.riq_actual_ratio = compression_ratio(
                riq_q, build_archive(riq_q, precision=precision)
            ).actual_ratio
            point.riq_satisfied = trace.satisfied
        logger.debug(
            "%d bits: deviation=%.6g ratio=%s riq=%s",
            bits,
            deviation,
            actual_ratio,
            point.riq_actual_ratio,
        )
        points.append(point)
    return points
