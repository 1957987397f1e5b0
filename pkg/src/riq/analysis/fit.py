"""Inverse-square law fit of deviation against k."""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from ..errors import DegenerateFitError
from .results import FitResult, SweepPoint

MIN_VARIANCE = 1e-30


def fit_inverse_square(points: Sequence[tuple[float, float]]) -> FitResult:
    """Least-squares fit of y = a / k^2 through the origin in 1/k^2.

    Raises:
        DegenerateFitError: fewer than 3 points, repeated k, non-positive k, or
            deviations with (near) zero variance
    """
    if len(points) < 3:
        raise DegenerateFitError(f"A fit needs at least 3 points, got {len(points)}")
    k = np.asarray([p[0] for p in points], dtype=np.float64)
    y = np.asarray([p[1] for p in points], dtype=np.float64)
    if np.any(k <= 0):
        raise DegenerateFitError("k values must be positive")
    if np.unique(k).size != k.size:
        raise DegenerateFitError("k values must be distinct")
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    if ss_tot <= MIN_VARIANCE * max(1.0, float(np.sum(y * y))):
        raise DegenerateFitError("Deviations are constant; the fit is undetermined")

    x = 1.0 / (k * k)
    (a,), *_ = np.linalg.lstsq(x[:, None], y, rcond=None)
    a = max(float(a), 0.0)
    ss_res = float(np.sum((y - a * x) ** 2))
    r_squared = float(np.clip(1.0 - ss_res / ss_tot, 0.0, 1.0))
    return FitResult(
        a=a, r_squared=r_squared, k_low=float(k.min()), k_high=float(k.max()), count=int(k.size)
    )


def fit_sweep(points: Sequence[SweepPoint]) -> FitResult:
    return fit_inverse_square([(p.k, p.mean_deviation) for p in points])
