"""Compressor - main interface for compress / decompress workflows."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

from ..config import Config, get_config
from ..errors import ShapeMismatchError
from ..models.archive import CompressedArchive
from ..models.calibration import CalibrationSet, DeviationReport
from ..models.enums import Eps0Policy
from ..models.network import Model
from ..models.quantized import QuantizedModel
from ..models.report import CalibrationInfo, CompressionReport, LayerRow
from ..storage.archive import read_archive, write_archive
from ..storage.calibration import load_calibration
from .compressor import (
    LayerStats,
    RatioReport,
    build_archive,
    compression_ratio,
    layer_stats,
    reconstruct_model,
)
from .forward import DeviationMeter
from .quantizer import dequantize
from .search import SearchTrace, rate_targeted_search, riq_search

logger = logging.getLogger(__name__)


def resolve_calibration(
    model: Model,
    calib_path: Path | str | None = None,
    count: int = 4,
    seed: int = 0,
) -> CalibrationSet:
    """Calibration set from a file, or Gaussian samples matching the model's input."""
    if calib_path is not None:
        return load_calibration(calib_path)
    shape = model.resolved_input_shape()
    if shape is None:
        raise ShapeMismatchError(
            "Cannot draw Gaussian calibration: the model's input shape is unknown"
        )
    return CalibrationSet.gaussian(shape, count=count, seed=seed)


@dataclass
class CompressionResult:
    """Everything one compression run produced."""

    qmodel: QuantizedModel
    trace: SearchTrace
    archive: CompressedArchive
    ratio: RatioReport
    deviation: DeviationReport
    layers: list[LayerStats]

    @property
    def satisfied(self) -> bool:
        return self.trace.satisfied

    def to_report(
        self, calib: CalibrationSet, eps0_policy: Eps0Policy, stop_threshold: float
    ) -> CompressionReport:
        trace = self.trace
        return CompressionReport(
            mode=trace.mode,
            deviation_budget=trace.target if trace.mode == "deviation" else None,
            target_ratio=trace.target if trace.mode == "rate" else None,
            satisfied=trace.satisfied,
            chosen_k=trace.chosen_k,
            k_min=trace.bounds.k_min,
            k_max=trace.bounds.k_max,
            eps0=trace.bounds.eps0,
            eps0_policy=eps0_policy.value,
            stop_threshold=stop_threshold,
            evaluations=trace.evaluation_count,
            iterations=trace.iterations,
            deviation=self.deviation.mean_deviation,
            max_deviation=self.deviation.max_deviation,
            est_ratio=self.ratio.est_ratio,
            actual_ratio=self.ratio.actual_ratio,
            inverse_ratio=self.ratio.inverse_ratio,
            bits_per_weight=self.ratio.bits_per_weight,
            coded_bytes=self.ratio.coded_bytes,
            extras_bytes=self.ratio.extras_bytes,
            calibration=CalibrationInfo(
                source=calib.source.value, count=calib.count, seed=calib.seed
            ),
            degenerate_layers=self.qmodel.degenerate_layers,
            layers=[
                LayerRow(
                    layer=row.layer,
                    n=row.n,
                    norm=row.norm,
                    delta=row.delta,
                    eps=row.eps,
                    rate=row.rate,
                    entropy=row.entropy,
                    alphabet_size=row.alphabet_size,
                    table_bits=row.table_bits,
                    stream_bytes=row.stream_bytes,
                    bits_per_symbol=row.bits_per_symbol,
                    degenerate=row.degenerate,
                )
                for row in self.layers
            ],
        )


class Compressor:
    """Main interface for compressing and decompressing models."""

    def __init__(
        self,
        eps0: float | None = None,
        eps0_policy: str | None = None,
        rbits: int | None = None,
        stop_threshold: float | None = None,
        precision: int | None = None,
        config: Config | None = None,
    ):
        """Initialize the compressor.

        Unset arguments resolve through the configuration
        (environment variable, then config file, then default).

        Args:
            eps0: Constant bin-width floor eps0, in (0, 1)
            eps0_policy: "constant", "per_layer_rbit" or "per_layer_fd"
            rbits: R for the per_layer_rbit policy
            stop_threshold: Search stops once its step is at or below this
            precision: rANS frequency precision in bits
        """
        config = config or get_config()
        self.eps0 = config.get_eps0(eps0)
        self.eps0_policy = config.get_eps0_policy(eps0_policy)
        self.rbits = config.resolve("quant.rbits", rbits)
        self.stop_threshold = config.get_stop_threshold(stop_threshold)
        self.precision = config.get_precision(precision)

    def compress(
        self,
        model: Model,
        calib: CalibrationSet,
        deviation: float | None = None,
        target_ratio: float | None = None,
        strict: bool = False,
    ) -> CompressionResult:
        """Search k, entropy-code the chosen quantization and measure it.

        Exactly one of ``deviation`` and ``target_ratio`` must be given.
        """
        if (deviation is None) == (target_ratio is None):
            raise ValueError("Give exactly one of a deviation budget or a target ratio")
        options = dict(
            eps0=self.eps0,
            stop_threshold=self.stop_threshold,
            policy=self.eps0_policy,
            rbits=self.rbits,
            precision=self.precision,
            strict=strict,
        )
        if deviation is not None:
            qmodel, trace = riq_search(model, calib, deviation, **options)
        else:
            qmodel, trace = rate_targeted_search(model, calib, target_ratio, **options)

        archive = build_archive(qmodel, model, self.precision)
        report = DeviationMeter(model, calib).measure(dequantize(qmodel, model))
        ratio = compression_ratio(qmodel, archive)
        logger.info(
            "k=%.4f deviation=%.6g ratio=%.3f (estimate %.3f)",
            trace.chosen_k,
            report.mean_deviation,
            ratio.actual_ratio,
            ratio.est_ratio,
        )
        return CompressionResult(
            qmodel=qmodel,
            trace=trace,
            archive=archive,
            ratio=ratio,
            deviation=report,
            layers=layer_stats(model, qmodel, archive),
        )

    def report(self, result: CompressionResult, calib: CalibrationSet) -> CompressionReport:
        return result.to_report(calib, self.eps0_policy, self.stop_threshold)

    @staticmethod
    def save(result: CompressionResult, path: Path | str) -> Path:
        return write_archive(result.archive, path)

    @staticmethod
    def decompress(path: Path | str, layers: list[str] | None = None) -> Model:
        """Read an archive and rebuild the (partial) model it holds."""
        return reconstruct_model(read_archive(path), layers)
