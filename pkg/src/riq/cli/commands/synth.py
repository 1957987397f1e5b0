"""Synth and calib commands: toy models and calibration files."""

from __future__ import annotations

from pathlib import Path
from typing import Optional

import typer

from ..common import console, handle_errors, parse_int_list

DESK_WIDTHS = "32,64,128,128,64,16"


def synth(
    out: Path = typer.Option(..., "--out", "-o", help="Model container to write (.riqm)"),
    widths: str = typer.Option(DESK_WIDTHS, "--widths", "-w", help="input,hidden...,output"),
    init: str = typer.Option("gaussian", "--init", help="gaussian or uniform"),
    seed: int = typer.Option(0, "--seed", "-s", help="Random seed"),
    last_activation: str = typer.Option(
        "identity", "--last-activation", help="identity or relu"
    ),
    sparsity: float = typer.Option(0.0, "--sparsity", help="Prune this fraction of weights"),
    conv: bool = typer.Option(False, "--conv", help="Small conv stack with a dense head"),
    packed: bool = typer.Option(False, "--packed", help="Write a zip instead of a directory"),
) -> None:
    """Write a seeded toy model."""
    from ...core.synth import conv_arch, mlp_arch, prune_magnitude, synth_model
    from ...models.enums import Activation, InitFamily
    from ...storage.container import save_model

    with handle_errors():
        family = InitFamily(init)
        if conv:
            arch, input_shape = conv_arch(
                in_channels=1, channels=[8, 16], kernel=3, spatial=12, classes=10
            )
            model = synth_model(seed, arch, family, input_shape=input_shape)
        else:
            arch = mlp_arch(parse_int_list(widths, "--widths"), Activation(last_activation))
            model = synth_model(seed, arch, family)
        if sparsity:
            model = prune_magnitude(model, sparsity)
        save_model(model, out, packed=packed)

    console.print(
        f"[green]✓[/green] {model.num_layers} layers, {model.total_weights} weights -> {out}"
    )


def calib(
    out: Path = typer.Option(..., "--out", "-o", help="Calibration file to write"),
    model: Optional[Path] = typer.Option(
        None, "--model", "-m", help="Take the sample shape from this model"
    ),
    shape: Optional[str] = typer.Option(None, "--shape", help="Sample shape, e.g. 32 or 1,12,12"),
    count: Optional[int] = typer.Option(None, "--count", "-n", help="Number of samples"),
    seed: Optional[int] = typer.Option(None, "--seed", "-s", help="Random seed"),
) -> None:
    """Write a Gaussian calibration set and its JSON sidecar."""
    from ...config import get_config
    from ...core.pipeline import resolve_calibration
    from ...models.calibration import CalibrationSet
    from ...storage.calibration import save_calibration
    from ...storage.container import load_model

    config = get_config()
    with handle_errors():
        count = config.resolve("calib.count", count)
        seed = config.resolve("calib.seed", seed)
        if (model is None) == (shape is None):
            raise ValueError("Give exactly one of --model or --shape")
        if model is not None:
            calibration = resolve_calibration(load_model(model), count=count, seed=seed)
        else:
            dims = tuple(parse_int_list(shape, "--shape"))
            calibration = CalibrationSet.gaussian(dims, count=count, seed=seed)
        save_calibration(calibration, out)

    console.print(
        f"[green]✓[/green] {calibration.count} sample(s) of shape "
        f"{calibration.sample_shape} -> {out}"
    )
