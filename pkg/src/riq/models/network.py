"""Layered weight model data types."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from pydantic import BaseModel, Field, model_validator

from ..errors import EmptyArchError, ManifestMismatchError, NonFiniteWeightError
from .enums import Activation, LayerKind

MANIFEST_VERSION = 1


class LayerSpec(BaseModel):
    """Topology of one layer.

    Shapes are ``[out, in]`` for dense layers and ``[out_ch, in_ch, kh, kw]``
    for conv2d layers. Weights are flattened row-major over the shape.
    """

    name: str = Field(min_length=1)
    kind: LayerKind = LayerKind.DENSE
    activation: Activation = Activation.RELU
    shape: list[int]
    bias_count: int = Field(default=0, ge=0)
    weight_count: int | None = None  # optional in manifests; must match shape

    @model_validator(mode="after")
    def _check_shape(self) -> "LayerSpec":
        arity = 2 if self.kind == LayerKind.DENSE else 4
        if len(self.shape) != arity:
            raise ValueError(
                f"{self.kind.value} layer '{self.name}' needs a {arity}-entry shape, "
                f"got {self.shape}"
            )
        if any(d <= 0 for d in self.shape):
            raise ValueError(f"Layer '{self.name}' has a non-positive dimension: {self.shape}")
        n = math.prod(self.shape)
        if self.weight_count is None:
            self.weight_count = n
        elif self.weight_count != n:
            raise ValueError(
                f"Layer '{self.name}' declares weight_count={self.weight_count} "
                f"but its shape holds {n}"
            )
        return self

    @property
    def n(self) -> int:
        """Number of quantized weights n_l."""
        return math.prod(self.shape)

    @property
    def fan_in(self) -> int:
        return math.prod(self.shape[1:])

    @property
    def out_features(self) -> int:
        return self.shape[0]


class ModelManifest(BaseModel):
    """The ``manifest.json`` document of a model container."""

    version: int = MANIFEST_VERSION
    layers: list[LayerSpec]
    input_shape: list[int] | None = None  # required for conv-first models

    @model_validator(mode="after")
    def _check_layers(self) -> "ModelManifest":
        if self.version != MANIFEST_VERSION:
            raise ValueError(f"Unsupported manifest version: {self.version}")
        names = [layer.name for layer in self.layers]
        if len(set(names)) != len(names):
            raise ValueError(f"Layer names must be unique: {names}")
        return self

    @property
    def blob_size(self) -> int:
        """Expected byte length of ``weights.bin``."""
        return 4 * sum(layer.n + layer.bias_count for layer in self.layers)


def _as_flat_f32(values: np.ndarray | list[float]) -> np.ndarray:
    arr = np.ascontiguousarray(np.asarray(values, dtype=np.float32).reshape(-1))
    arr.flags.writeable = False
    return arr


@dataclass
class Model:
    """A layered weight model: topology plus float32 weights and biases."""

    layers: list[LayerSpec]
    weights: list[np.ndarray]
    biases: list[np.ndarray] = field(default_factory=list)
    input_shape: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        if not self.layers:
            raise EmptyArchError("A model needs at least one layer")
        names = [layer.name for layer in self.layers]
        if len(set(names)) != len(names):
            raise ManifestMismatchError(f"Layer names must be unique: {names}")
        if not self.biases:
            self.biases = [np.zeros(layer.bias_count, dtype=np.float32) for layer in self.layers]
        if len(self.weights) != len(self.layers) or len(self.biases) != len(self.layers):
            raise ManifestMismatchError(
                f"{len(self.layers)} layers but {len(self.weights)} weight and "
                f"{len(self.biases)} bias vectors"
            )

        self.weights = [_as_flat_f32(w) for w in self.weights]
        self.biases = [_as_flat_f32(b) for b in self.biases]
        for layer, w, b in zip(self.layers, self.weights, self.biases):
            if w.size != layer.n:
                raise ManifestMismatchError(
                    f"Layer '{layer.name}' expects {layer.n} weights, got {w.size}"
                )
            if b.size != layer.bias_count:
                raise ManifestMismatchError(
                    f"Layer '{layer.name}' expects {layer.bias_count} biases, got {b.size}"
                )
            bad = int(np.count_nonzero(~np.isfinite(w))) + int(np.count_nonzero(~np.isfinite(b)))
            if bad:
                raise NonFiniteWeightError(layer.name, bad)
        if self.input_shape is not None:
            self.input_shape = tuple(int(d) for d in self.input_shape)

    @property
    def num_layers(self) -> int:
        return len(self.layers)

    @property
    def total_weights(self) -> int:
        return sum(layer.n for layer in self.layers)

    @property
    def layer_names(self) -> list[str]:
        return [layer.name for layer in self.layers]

    def index_of(self, name: str) -> int:
        """Return the position of a layer by name (ValueError if absent)."""
        return self.layer_names.index(name)

    def resolved_input_shape(self) -> tuple[int, ...] | None:
        """Input shape of the first layer, if it can be determined."""
        if self.input_shape is not None:
            return self.input_shape
        first = self.layers[0]
        if first.kind == LayerKind.DENSE:
            return (first.shape[1],)
        return None

    def weight_tensor(self, index: int) -> np.ndarray:
        """Weights of one layer reshaped to the declared shape."""
        return self.weights[index].reshape(self.layers[index].shape)

    def with_weights(self, weights: list[np.ndarray]) -> "Model":
        """Return a copy of this model carrying new weights and the same biases."""
        return Model(
            layers=[layer.model_copy() for layer in self.layers],
            weights=weights,
            biases=list(self.biases),
            input_shape=self.input_shape,
        )

    def manifest(self) -> ModelManifest:
        return ModelManifest(
            layers=[layer.model_copy() for layer in self.layers],
            input_shape=list(self.input_shape) if self.input_shape is not None else None,
        )
