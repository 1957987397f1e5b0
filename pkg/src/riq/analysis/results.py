"""Result types for rate-distortion analysis."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class SweepPoint:
    """Quantization of a model at one k, with per-layer detail."""

    k: float
    mean_deviation: float
    est_ratio: float
    actual_ratio: float
    layers: list[str] = field(default_factory=list)
    sizes: list[int] = field(default_factory=list)
    deltas: list[float] = field(default_factory=list)
    eps: list[float] = field(default_factory=list)
    rates: list[float] = field(default_factory=list)
    entropies: list[float] = field(default_factory=list)

    @property
    def mean_entropy(self) -> float:
        """Bits/symbol over the whole model: sum(n_l H_l) / sum(n_l)."""
        sizes = np.asarray(self.sizes, dtype=np.float64)
        return float(np.dot(sizes, self.entropies) / sizes.sum())


@dataclass
class FitResult:
    """Least-squares fit of deviation = a / k^2."""

    a: float
    r_squared: float
    k_low: float
    k_high: float
    count: int

    def predict(self, k: float) -> float:
        return self.a / (k * k)


@dataclass
class CompositionCheck:
    """Whole-model rotation against the norm-weighted mix of layer rotations."""

    residual: float
    combined_distortion: float  # cosine distance of the concatenated weights
    weighted_distortion: float  # sum of (||w_l||^2 / ||w||^2) * eps_l
    max_layer_distortion: float
    in_regime: bool


@dataclass
class UniformPoint:
    """Range-based R-bit quantization, paired with RIQ at the same deviation."""

    bits: int
    deviation: float
    mean_entropy: float
    est_ratio: float
    actual_ratio: float | None  # None when an alphabet exceeds the coder's limit
    skipped_layers: list[str] = field(default_factory=list)
    riq_k: float | None = None
    riq_deviation: float | None = None
    riq_est_ratio: float | None = None
    riq_actual_ratio: float | None = None
    riq_satisfied: bool = False

    @property
    def riq_gain(self) -> float | None:
        """RIQ ratio over uniform ratio at matched deviation."""
        if self.riq_actual_ratio is None or self.actual_ratio is None:
            return None
        return self.riq_actual_ratio / self.actual_ratio
