"""Enumerations for RIQ."""

from enum import Enum


class LayerKind(str, Enum):
    """Affine operation of a layer."""

    DENSE = "dense"
    CONV2D = "conv2d"


class Activation(str, Enum):
    """Nonlinearity applied after the affine operation."""

    RELU = "relu"
    IDENTITY = "identity"


class InitFamily(str, Enum):
    """Weight distribution for synthetic models.

    - GAUSSIAN: mean 0, std 1/sqrt(fan_in)
    - UNIFORM: [-1/sqrt(fan_in), 1/sqrt(fan_in)]
    """

    GAUSSIAN = "gaussian"
    UNIFORM = "uniform"


class Eps0Policy(str, Enum):
    """How the additive floor term of the bin width is chosen per layer."""

    CONSTANT = "constant"
    PER_LAYER_RBIT = "per_layer_rbit"
    PER_LAYER_FD = "per_layer_fd"


class CalibSource(str, Enum):
    """Where calibration samples come from."""

    FILE = "file"
    GAUSSIAN = "gaussian"
