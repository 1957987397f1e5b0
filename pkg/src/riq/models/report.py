"""JSON report written beside every compressed archive."""

from __future__ import annotations

from pydantic import BaseModel, Field


class LayerRow(BaseModel):
    layer: str
    n: int
    norm: float
    delta: float
    eps: float
    rate: float
    entropy: float
    alphabet_size: int = 0
    table_bits: int = 0
    stream_bytes: int = 0
    bits_per_symbol: float = 0.0
    degenerate: bool = False


class CalibrationInfo(BaseModel):
    source: str
    count: int
    seed: int | None = None


class CompressionReport(BaseModel):
    """Outcome of one ``riq compress`` run.

    Carries no timestamps, so identical inputs give byte-identical reports.
    """

    mode: str  # "deviation" or "rate"
    deviation_budget: float | None = None
    target_ratio: float | None = None
    satisfied: bool
    chosen_k: float
    k_min: float
    k_max: float
    eps0: float
    eps0_policy: str
    stop_threshold: float
    evaluations: int
    iterations: int
    deviation: float  # mean over the calibration set
    max_deviation: float
    est_ratio: float
    actual_ratio: float
    inverse_ratio: float
    bits_per_weight: float
    coded_bytes: int
    extras_bytes: int
    calibration: CalibrationInfo
    degenerate_layers: list[str] = Field(default_factory=list)
    layers: list[LayerRow] = Field(default_factory=list)
