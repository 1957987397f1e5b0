"""Quantization configuration and quantized-model data types."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from .enums import Eps0Policy
from .network import LayerSpec

DEFAULT_EPS0 = 0.01
DEFAULT_RBITS = 8


class QuantConfig(BaseModel):
    """Parameters of one RIQ quantization.

    ``k`` is the single scalar shared by all layers; ``eps0`` is the constant
    floor used by the ``constant`` policy (and by the search bounds).
    """

    model_config = ConfigDict(frozen=True)

    k: float = Field(gt=0)
    eps0_policy: Eps0Policy = Eps0Policy.CONSTANT
    eps0: float = Field(default=DEFAULT_EPS0, ge=0, lt=1)
    rbits: int = Field(default=DEFAULT_RBITS, ge=1, le=32)  # per_layer_rbit only

    def with_k(self, k: float) -> "QuantConfig":
        return self.model_copy(update={"k": float(k)})


@dataclass
class QuantizedLayer:
    """Integer symbols of one layer plus its bin width."""

    name: str
    delta: float
    symbols: np.ndarray
    degenerate: bool = False  # zero-norm layer quantized with the delta=1 sentinel

    @property
    def n(self) -> int:
        return int(self.symbols.size)

    @property
    def min_symbol(self) -> int:
        return int(self.symbols.min()) if self.symbols.size else 0

    @property
    def max_symbol(self) -> int:
        return int(self.symbols.max()) if self.symbols.size else 0

    def reconstruct(self, dtype: type = np.float64) -> np.ndarray:
        """Reconstructed weights ``symbols * delta``."""
        return (self.symbols.astype(np.float64) * self.delta).astype(dtype)


@dataclass
class QuantizedModel:
    """One quantized layer per model layer, with the config that produced it."""

    layers: list[QuantizedLayer]
    config: QuantConfig | None = None
    source: list[LayerSpec] = field(default_factory=list)

    @property
    def deltas(self) -> list[float]:
        return [layer.delta for layer in self.layers]

    @property
    def layer_names(self) -> list[str]:
        return [layer.name for layer in self.layers]

    @property
    def total_symbols(self) -> int:
        return sum(layer.n for layer in self.layers)

    @property
    def degenerate_layers(self) -> list[str]:
        return [layer.name for layer in self.layers if layer.degenerate]

    def layer(self, name: str) -> QuantizedLayer:
        for layer in self.layers:
            if layer.name == name:
                return layer
        raise KeyError(name)
