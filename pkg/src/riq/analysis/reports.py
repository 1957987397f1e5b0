"""CSV report tables."""

from __future__ import annotations

from collections.abc import Sequence
from pathlib import Path

import pandas as pd

from ..core.compressor import LayerStats
from ..errors import IoFailureError
from .results import FitResult, SweepPoint, UniformPoint

SWEEP_COLUMNS = ["k", "deviation", "mean_entropy", "est_ratio", "actual_ratio"]
LAYER_COLUMNS = ["layer", "n", "norm", "delta", "eps", "rate", "entropy"]
FIT_COLUMNS = ["a", "r2"]
UNIFORM_COLUMNS = [
    "bits",
    "deviation",
    "mean_entropy",
    "est_ratio",
    "actual_ratio",
    "riq_k",
    "riq_deviation",
    "riq_actual_ratio",
    "skipped_layers",
]


def sweep_frame(points: Sequence[SweepPoint]) -> pd.DataFrame:
    rows = [
        [p.k, p.mean_deviation, p.mean_entropy, p.est_ratio, p.actual_ratio] for p in points
    ]
    return pd.DataFrame(rows, columns=SWEEP_COLUMNS)


def layers_frame(stats: Sequence[LayerStats]) -> pd.DataFrame:
    rows = [[s.layer, s.n, s.norm, s.delta, s.eps, s.rate, s.entropy] for s in stats]
    return pd.DataFrame(rows, columns=LAYER_COLUMNS)


def fit_frame(fit: FitResult) -> pd.DataFrame:
    return pd.DataFrame([[fit.a, fit.r_squared]], columns=FIT_COLUMNS)


def uniform_frame(points: Sequence[UniformPoint]) -> pd.DataFrame:
    rows = [
        [
            p.bits,
            p.deviation,
            p.mean_entropy,
            p.est_ratio,
            p.actual_ratio,
            p.riq_k,
            p.riq_deviation,
            p.riq_actual_ratio,
            ";".join(p.skipped_layers),
        ]
        for p in points
    ]
    return pd.DataFrame(rows, columns=UNIFORM_COLUMNS)


def write_csv(frame: pd.DataFrame, path: Path | str) -> Path:
    """Write a report table (no index column)."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(path, index=False)
    except OSError as e:
        raise IoFailureError(f"Cannot write {path}: {e}") from e
    return path
