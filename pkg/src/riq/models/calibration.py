"""Calibration inputs and deviation measurement results."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import EmptyInputError
from .enums import CalibSource


@dataclass
class CalibrationSet:
    """B input samples stacked along axis 0."""

    samples: np.ndarray
    source: CalibSource = CalibSource.FILE
    seed: int | None = None

    def __post_init__(self) -> None:
        self.samples = np.asarray(self.samples, dtype=np.float32)
        if self.samples.ndim < 2 or self.samples.shape[0] < 1:
            raise EmptyInputError("A calibration set needs at least one sample")
        if not np.all(np.isfinite(self.samples)):
            raise ValueError("Calibration samples must be finite")

    @property
    def count(self) -> int:
        return int(self.samples.shape[0])

    @property
    def sample_shape(self) -> tuple[int, ...]:
        return tuple(int(d) for d in self.samples.shape[1:])

    @classmethod
    def gaussian(cls, shape: tuple[int, ...], count: int = 4, seed: int = 0) -> "CalibrationSet":
        """Standard-normal samples drawn from a seeded generator."""
        if count < 1:
            raise EmptyInputError("A calibration set needs at least one sample")
        rng = np.random.default_rng(seed)
        samples = rng.standard_normal((count, *shape)).astype(np.float32)
        return cls(samples=samples, source=CalibSource.GAUSSIAN, seed=seed)


@dataclass
class DeviationReport:
    """Output deviation over a calibration set plus per-layer weight distortion."""

    per_sample: list[float]
    per_layer_distortion: list[float] = field(default_factory=list)
    per_layer_angle: list[float] = field(default_factory=list)

    @property
    def mean_deviation(self) -> float:
        """The deviation compared against the budget D."""
        return float(np.mean(self.per_sample))

    @property
    def max_deviation(self) -> float:
        return float(np.max(self.per_sample))
