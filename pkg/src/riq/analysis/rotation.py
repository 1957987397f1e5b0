"""Random orthogonal rotations and the rotation invariance of bin widths."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core.quantizer import delta_for_layer, range_step
from ..errors import DimensionTooLargeError
from ..models.quantized import QuantConfig

MAX_DIMENSION = 512


def random_rotation(n: int, seed: int = 0) -> np.ndarray:
    """Haar-distributed orthogonal n x n matrix from the QR of a seeded Gaussian matrix."""
    if n < 1:
        raise ValueError(f"Invalid dimension: {n}")
    if n > MAX_DIMENSION:
        raise DimensionTooLargeError(f"Rotations are limited to n <= {MAX_DIMENSION}, got {n}")
    rng = np.random.default_rng(seed)
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    return q * signs


@dataclass
class RotationCheck:
    """Relative bin-width changes under random rotations of one weight vector."""

    riq_changes: np.ndarray
    range_changes: np.ndarray

    @property
    def max_riq_change(self) -> float:
        return float(self.riq_changes.max())

    def range_changed(self, tol: float = 1e-3) -> int:
        """Trials in which the range-based step moved by more than ``tol`` relative."""
        return int(np.count_nonzero(self.range_changes > tol))


def rotation_check(
    w: np.ndarray,
    trials: int = 100,
    seed: int = 0,
    k: float = 100.0,
    eps0: float = 0.01,
    bits: int = 8,
) -> RotationCheck:
    """Rotate ``w`` ``trials`` times and compare RIQ and range-based bin widths."""
    w = np.asarray(w, dtype=np.float64).reshape(-1)
    n = w.size
    config = QuantConfig(k=k, eps0=eps0)
    riq_ref = delta_for_layer(w, n, config)
    range_ref = range_step(w, bits)
    rng = np.random.default_rng(seed)
    riq_changes = np.empty(trials)
    range_changes = np.empty(trials)
    for t in range(trials):
        rotated = random_rotation(n, int(rng.integers(0, 2**31))) @ w
        riq_changes[t] = abs(delta_for_layer(rotated, n, config) - riq_ref) / riq_ref
        range_changes[t] = abs(range_step(rotated, bits) - range_ref) / range_ref
    return RotationCheck(riq_changes=riq_changes, range_changes=range_changes)

