"""Composition of per-layer rotations into the whole-model rotation.

In the high-rate regime the cosine of the angle between the concatenated
weight vectors approaches the norm-weighted average of the per-layer
cosines. The residual of that identity is reported here.
"""

from __future__ import annotations

import logging

import numpy as np

from ..core.forward import cosine_distance_rows, layer_distortion
from ..core.quantizer import dequantize
from ..errors import OutOfRegimeError, ZeroVectorError
from ..models.network import Model
from ..models.quantized import QuantizedModel
from .results import CompositionCheck

logger = logging.getLogger(__name__)

REGIME_CAP = 1e-3


def _distortion(w: np.ndarray, w_hat: np.ndarray) -> float:
    try:
        return layer_distortion(w, w_hat)[0]
    except ZeroVectorError:
        return 0.0 if not np.any(w) and not np.any(w_hat) else 1.0


def check_composition(
    model: Model,
    qmodel: QuantizedModel | Model,
    eps_cap: float = REGIME_CAP,
    strict: bool = False,
) -> CompositionCheck:
    """Residual |cos(theta_total) - sum_l (||w_l||^2 / ||w||^2) cos(theta_l)|.

    Computed as the equivalent difference of cosine distances, which keeps
    precision when every angle is tiny. The result is flagged (or raised
    with ``strict``) when some layer's distortion exceeds ``eps_cap``.
    """
    quantized = dequantize(qmodel, model) if isinstance(qmodel, QuantizedModel) else qmodel
    originals = [w.astype(np.float64) for w in model.weights]
    approx = [w.astype(np.float64) for w in quantized.weights]

    norms_sq = np.asarray([float(np.dot(w, w)) for w in originals])
    total = norms_sq.sum()
    eps_layers = np.asarray([_distortion(w, w_hat) for w, w_hat in zip(originals, approx)])

    w_all = np.concatenate(originals)[None, :]
    w_hat_all = np.concatenate(approx)[None, :]
    if total == 0.0 or not np.any(w_hat_all):
        raise ZeroVectorError("Composition is undefined for a zero model")
    combined = float(cosine_distance_rows(w_all, w_hat_all)[0])
    weighted = float(np.dot(norms_sq / total, eps_layers))

    check = CompositionCheck(
        residual=abs(combined - weighted),
        combined_distortion=combined,
        weighted_distortion=weighted,
        max_layer_distortion=float(eps_layers.max()),
        in_regime=bool(eps_layers.max() <= eps_cap),
    )
    if not check.in_regime:
        logger.warning(
            "Largest layer distortion %.3g exceeds the high-rate cap %.3g",
            check.max_layer_distortion,
            eps_cap,
        )
        if strict:
            raise OutOfRegimeError(
                f"Layer distortion {check.max_layer_distortion:.3g} exceeds {eps_cap:.3g}"
            )
    return check
