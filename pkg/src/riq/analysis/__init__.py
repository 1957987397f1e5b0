"""Rate-distortion analysis for RIQ."""

from .composition import check_composition
from .fit import fit_inverse_square, fit_sweep
from .results import CompositionCheck, FitResult, SweepPoint, UniformPoint
from .rotation import RotationCheck, random_rotation, rotation_check
from .sweep import default_grid, grid_bounds, log_grid, parse_grid, sweep
from .uniform import compare_uniform, uniform_deltas

__all__ = [
    "CompositionCheck",
    "FitResult",
    "RotationCheck",
    "SweepPoint",
    "UniformPoint",
    "check_composition",
    "compare_uniform",
    "default_grid",
    "fit_inverse_square",
    "fit_sweep",
    "grid_bounds",
    "log_grid",
    "parse_grid",
    "random_rotation",
    "rotation_check",
    "sweep",
    "uniform_deltas",
]
