"""Synthetic toy models for desk-scale experiments."""

from __future__ import annotations

import numpy as np

from ..errors import EmptyArchError
from ..models.enums import Activation, InitFamily, LayerKind
from ..models.network import LayerSpec, Model


def synth_model(
    seed: int,
    arch: list[LayerSpec],
    init: InitFamily = InitFamily.GAUSSIAN,
    input_shape: tuple[int, ...] | None = None,
) -> Model:
    """Draw i.i.d. weights for an architecture.

    Gaussian weights have mean 0 and std 1/sqrt(fan_in); uniform weights lie in
    [-1/sqrt(fan_in), 1/sqrt(fan_in)]. Biases are zero. The same seed always
    yields bit-identical weights.
    """
    if not arch:
        raise EmptyArchError("Cannot synthesize a model from an empty architecture")

    rng = np.random.default_rng(seed)
    weights = []
    for layer in arch:
        scale = 1.0 / np.sqrt(layer.fan_in)
        if init == InitFamily.GAUSSIAN:
            w = rng.normal(0.0, scale, size=layer.n)
        else:
            w = rng.uniform(-scale, scale, size=layer.n)
        weights.append(w.astype(np.float32))
    biases = [np.zeros(layer.bias_count, dtype=np.float32) for layer in arch]
    return Model(layers=list(arch), weights=weights, biases=biases, input_shape=input_shape)


def mlp_arch(
    widths: list[int],
    last_activation: Activation = Activation.IDENTITY,
    with_bias: bool = True,
) -> list[LayerSpec]:
    """Dense architecture from ``[input, hidden..., output]`` widths.

    Hidden layers use ReLU; the output layer uses ``last_activation``.
    """
    if len(widths) < 2:
        raise EmptyArchError("An MLP needs an input width and at least one layer width")
    layers = []
    for i, (fan_in, fan_out) in enumerate(zip(widths[:-1], widths[1:])):
        last = i == len(widths) - 2
        layers.append(
            LayerSpec(
                name=f"fc{i + 1}",
                kind=LayerKind.DENSE,
                activation=last_activation if last else Activation.RELU,
                shape=[fan_out, fan_in],
                bias_count=fan_out if with_bias else 0,
            )
        )
    return layers


def conv_arch(
    in_channels: int,
    channels: list[int],
    kernel: int,
    spatial: int,
    classes: int,
) -> tuple[list[LayerSpec], tuple[int, ...]]:
    """Small conv stack followed by a dense classifier head.

    Returns the architecture and the input shape ``(in_channels, spatial, spatial)``.
    """
    layers = []
    prev = in_channels
    size = spatial
    for i, ch in enumerate(channels):
        layers.append(
            LayerSpec(
                name=f"conv{i + 1}",
                kind=LayerKind.CONV2D,
                activation=Activation.RELU,
                shape=[ch, prev, kernel, kernel],
                bias_count=ch,
            )
        )
        prev = ch
        size = size - kernel + 1
    if size < 1:
        raise EmptyArchError(f"Input of {spatial}px is too small for {len(channels)} convs")
    layers.append(
        LayerSpec(
            name="head",
            kind=LayerKind.DENSE,
            activation=Activation.IDENTITY,
            shape=[classes, prev * size * size],
            bias_count=classes,
        )
    )
    return layers, (in_channels, spatial, spatial)


def prune_magnitude(model: Model, sparsity: float) -> Model:
    """Zero the smallest-magnitude fraction of every layer's weights.

    Ties are broken by flat index so the result is deterministic.
    """
    if not 0.0 <= sparsity < 1.0:
        raise ValueError(f"Invalid sparsity: {sparsity}. Must be in [0, 1)")
    pruned = []
    for w in model.weights:
        cut = int(np.floor(sparsity * w.size))
        out = w.copy()
        if cut:
            order = np.argsort(np.abs(w), kind="stable")
            out[order[:cut]] = 0.0
        pruned.append(out)
    return model.with_weights(pruned)
