"""Nested-refinement search for the single RIQ parameter k.

The search scans k upward from k_min in steps of sqrt(k_max - k_min). Each
time the predicate holds it shrinks the window to end at that k, takes the
square root of the step and backs off by ``step * floor(step)``. It stops
at the first success whose step is at or below the stop threshold.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass, field
from pathlib import Path

import pandas as pd

from ..coding.table import DEFAULT_PRECISION
from ..errors import BudgetOutOfRangeError, Eps0OutOfRangeError, UnsatisfiableError
from ..models.calibration import CalibrationSet
from ..models.enums import Eps0Policy
from ..models.network import Model
from ..models.quantized import DEFAULT_EPS0, DEFAULT_RBITS, QuantConfig, QuantizedModel
from .compressor import estimate_ratio
from .forward import DeviationMeter
from .quantizer import dequantize, quantize_model

logger = logging.getLogger(__name__)

DEFAULT_STOP_THRESHOLD = 3.0
TRACE_COLUMNS = ["k", "step", "deviation", "est_ratio", "accepted"]


@dataclass(frozen=True)
class SearchBounds:
    """Interval known to contain the optimal k."""

    k_min: float
    k_max: float
    n_star: int  # largest layer size
    eps0: float

    def contains(self, k: float, rel_tol: float = 1e-9) -> bool:
        return self.k_min * (1 - rel_tol) <= k <= self.k_max * (1 + rel_tol)


def bounds_for_size(n_star: int, eps0: float) -> SearchBounds:
    """k bounds for a largest layer of ``n_star`` weights.

    Raises:
        Eps0OutOfRangeError: unless 0 < eps0 < 1
    """
    if not 0.0 < eps0 < 1.0:
        raise Eps0OutOfRangeError(f"eps0 must lie in (0, 1), got {eps0}")
    if n_star < 1:
        raise ValueError(f"Invalid layer size: {n_star}")
    root = math.sqrt(n_star / 24.0)
    return SearchBounds(
        k_min=root / (1.0 - eps0),
        k_max=root / (eps0 * math.sqrt(eps0)),
        n_star=n_star,
        eps0=eps0,
    )


def k_bounds(model: Model, eps0: float) -> SearchBounds:
    """k bounds from the model's largest layer."""
    return bounds_for_size(max(layer.n for layer in model.layers), eps0)


@dataclass
class Evaluation:
    """One quantize-and-measure evaluation at a given k."""

    k: float
    step: float
    deviation: float
    est_ratio: float
    accepted: bool
    deltas: list[float] = field(default_factory=list)


@dataclass
class SearchTrace:
    """Every distinct k the search evaluated, in evaluation order."""

    bounds: SearchBounds
    mode: str = "deviation"  # or "rate"
    target: float = 0.0  # deviation budget D or target ratio
    evaluations: list[Evaluation] = field(default_factory=list)
    chosen_k: float = 0.0
    iterations: int = 0
    satisfied: bool = False

    @property
    def evaluation_count(self) -> int:
        return len(self.evaluations)

    @property
    def chosen(self) -> Evaluation:
        for ev in self.evaluations:
            if ev.k == self.chosen_k:
                return ev
        raise KeyError(self.chosen_k)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [[ev.k, ev.step, ev.deviation, ev.est_ratio, ev.accepted] for ev in self.evaluations],
            columns=TRACE_COLUMNS,
        )

    def write_csv(self, path: Path | str) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        self.to_frame().to_csv(path, index=False)
        return path


class _Evaluator:
    """Quantizes at k, measures deviation and estimated ratio; memoized by k."""

    def __init__(
        self,
        model: Model,
        calib: CalibrationSet,
        config: QuantConfig,
        precision: int,
        accept: Callable[[float, float], bool],
    ):
        self.model = model
        self.config = config
        self.precision = precision
        self.accept = accept
        self.meter = DeviationMeter(model, calib)
        self.trace_list: list[Evaluation] = []
        self._cache: dict[float, tuple[Evaluation, QuantizedModel]] = {}

    def __call__(self, k: float, step: float) -> tuple[Evaluation, QuantizedModel]:
        if k in self._cache:
            return self._cache[k]
        qmodel = quantize_model(self.model, self.config.with_k(k))
        report = self.meter.measure(dequantize(qmodel, self.model), per_layer=False)
        deviation = report.mean_deviation
        ratio = estimate_ratio(qmodel, self.precision)
        ev = Evaluation(
            k=k,
            step=step,
            deviation=deviation,
            est_ratio=ratio,
            accepted=self.accept(deviation, ratio),
            deltas=qmodel.deltas,
        )
        logger.debug(
            "k=%.4f step=%.4f deviation=%.6g ratio=%.3f %s",
            k,
            step,
            deviation,
            ratio,
            "accept" if ev.accepted else "reject",
        )
        self._cache[k] = (ev, qmodel)
        self.trace_list.append(ev)
        return ev, qmodel


def _refine(
    evaluate: _Evaluator,
    bounds: SearchBounds,
    hit: Callable[[Evaluation], bool],
    stop_threshold: float,
) -> tuple[Evaluation | None, int]:
    """Smallest k (at the final step's resolution) for which ``hit`` holds.

    Returns the hit evaluation (None if no k up to k_max hits) and the number
    of loop iterations.
    """
    k_min = bounds.k_min
    k_max = bounds.k_max
    k = k_min
    step = math.sqrt(k_max - k_min)
    found: Evaluation | None = None
    iterations = 0

    while True:
        iterations += 1
        ev, _ = evaluate(k, step)
        if hit(ev):
            found = ev
            if step <= stop_threshold:
                break
            k_max = k
            step = math.sqrt(step)
            k = max(k - step * math.floor(step), k_min)
        else:
            if k >= k_max:
                break
            # k_max itself is always evaluated before giving up on a window
            k += step
            if k >= k_max * (1.0 - 1e-12):
                k = k_max
    return found, iterations


def _check_threshold(stop_threshold: float) -> None:
    if not stop_threshold > 1.0:
        raise ValueError(f"Invalid stop threshold: {stop_threshold}. Must be > 1")


def riq_search(
    model: Model,
    calib: CalibrationSet,
    deviation: float,
    eps0: float = DEFAULT_EPS0,
    stop_threshold: float = DEFAULT_STOP_THRESHOLD,
    *,
    policy: Eps0Policy = Eps0Policy.CONSTANT,
    rbits: int = DEFAULT_RBITS,
    precision: int = DEFAULT_PRECISION,
    strict: bool = False,
) -> tuple[QuantizedModel, SearchTrace]:
    """Find the smallest k whose quantized model deviates by at most ``deviation``.

    The deviation is the mean cosine distance between the original and the
    dequantized model's outputs over ``calib``, checked after all layers are
    quantized for a given k.

    When no k up to k_max meets the budget the k_max quantization is returned
    with ``trace.satisfied`` False, or ``UnsatisfiableError`` is raised (with
    that result attached) when ``strict`` is set.

    Raises:
        BudgetOutOfRangeError: unless 0 < deviation <= 2
        Eps0OutOfRangeError: unless 0 < eps0 < 1
    """
    if not 0.0 < deviation <= 2.0:
        raise BudgetOutOfRangeError(f"Deviation budget must lie in (0, 2], got {deviation}")
    _check_threshold(stop_threshold)
    bounds = k_bounds(model, eps0)
    config = QuantConfig(k=bounds.k_min, eps0_policy=policy, eps0=eps0, rbits=rbits)
    evaluate = _Evaluator(model, calib, config, precision, lambda dev, _: dev <= deviation)
    logger.info(
        "Searching k in [%.3f, %.3f] for deviation <= %g", bounds.k_min, bounds.k_max, deviation
    )

    found, iterations = _refine(evaluate, bounds, lambda ev: ev.accepted, stop_threshold)
    trace = SearchTrace(
        bounds=bounds, mode="deviation", target=deviation, iterations=iterations
    )
    if found is not None:
        trace.chosen_k = found.k
        trace.satisfied = True
        qmodel = evaluate(found.k, found.step)[1]
    else:
        ev, qmodel = evaluate(bounds.k_max, 0.0)
        trace.chosen_k = ev.k
        logger.warning(
            "No k up to k_max=%.3f meets deviation %g (floor %.6g)",
            bounds.k_max,
            deviation,
            ev.deviation,
        )
    trace.evaluations = list(evaluate.trace_list)
    logger.info(
        "Chose k=%.4f after %d evaluations", trace.chosen_k, trace.evaluation_count
    )

    if not trace.satisfied and strict:
        raise UnsatisfiableError(
            f"No k up to {bounds.k_max:.3f} meets deviation budget {deviation}",
            result=(qmodel, trace),
        )
    return qmodel, trace


def rate_targeted_search(
    model: Model,
    calib: CalibrationSet,
    target_ratio: float,
    eps0: float = DEFAULT_EPS0,
    stop_threshold: float = DEFAULT_STOP_THRESHOLD,
    *,
    policy: Eps0Policy = Eps0Policy.CONSTANT,
    rbits: int = DEFAULT_RBITS,
    precision: int = DEFAULT_PRECISION,
    strict: bool = False,
) -> tuple[QuantizedModel, SearchTrace]:
    """Find the largest k (least deviation) whose estimated ratio is >= ``target_ratio``.

    The refinement locates the smallest k whose estimated ratio drops below
    the target; the answer is the largest evaluated k below it that still
    meets the target. When even k_min misses the target the k_min
    quantization is returned unsatisfied (or raised with ``strict``).

    Raises:
        BudgetOutOfRangeError: unless target_ratio > 1
        Eps0OutOfRangeError: unless 0 < eps0 < 1
    """
    if not target_ratio > 1.0:
        raise BudgetOutOfRangeError(f"Target ratio must exceed 1, got {target_ratio}")
    _check_threshold(stop_threshold)
    bounds = k_bounds(model, eps0)
    config = QuantConfig(k=bounds.k_min, eps0_policy=policy, eps0=eps0, rbits=rbits)
    evaluate = _Evaluator(model, calib, config, precision, lambda _, ratio: ratio >= target_ratio)
    logger.info(
        "Searching k in [%.3f, %.3f] for ratio >= %g", bounds.k_min, bounds.k_max, target_ratio
    )

    miss, iterations = _refine(evaluate, bounds, lambda ev: not ev.accepted, stop_threshold)
    trace = SearchTrace(bounds=bounds, mode="rate", target=target_ratio, iterations=iterations)
    limit = miss.k if miss is not None else math.inf
    meeting = [ev for ev in evaluate.trace_list if ev.accepted and ev.k < limit]
    if meeting:
        best = max(meeting, key=lambda ev: ev.k)
        trace.satisfied = True
    else:
        best = evaluate(bounds.k_min, 0.0)[0]
        logger.warning("Target ratio %g is out of reach even at k_min", target_ratio)
    trace.chosen_k = best.k
    trace.evaluations = list(evaluate.trace_list)
    qmodel = evaluate(best.k, best.step)[1]

    if not trace.satisfied and strict:
        raise UnsatisfiableError(
            f"Even k_min={bounds.k_min:.3f} falls short of ratio {target_ratio}",
            result=(qmodel, trace),
        )
    return qmodel, trace


def scan_grid(
    model: Model,
    calib: CalibrationSet,
    deviation: float,
    eps0: float = DEFAULT_EPS0,
    resolution: float = DEFAULT_STOP_THRESHOLD,
    precision: int = DEFAULT_PRECISION,
) -> float | None:
    """Exhaustive ascending scan k_min, k_min + resolution, ...; first k meeting the budget."""
    bounds = k_bounds(model, eps0)
    config = QuantConfig(k=bounds.k_min, eps0=eps0)
    evaluate = _Evaluator(model, calib, config, precision, lambda dev, _: dev <= deviation)
    k = bounds.k_min
    while k <= bounds.k_max:
        if evaluate(k, resolution)[0].accepted:
            return k
        k += resolution
    return None
