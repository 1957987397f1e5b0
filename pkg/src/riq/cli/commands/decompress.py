"""Decompress command."""

from __future__ import annotations

from pathlib import Path
from typing import Optional

import typer

from ..common import check_distinct, console, handle_errors


def decompress_archive(
    input_path: Path = typer.Option(..., "--in", "-i", help="Archive to read (.rqz)"),
    out: Path = typer.Option(..., "--out", "-o", help="Model container to write (.riqm)"),
    layer: Optional[list[str]] = typer.Option(
        None, "--layer", "-l", help="Decode only this layer (repeatable)"
    ),
    packed: bool = typer.Option(False, "--packed", help="Write a zip instead of a directory"),
) -> None:
    """Rebuild a model with float32 weights symbols * delta."""
    from ...core.pipeline import Compressor
    from ...storage.container import save_model

    with handle_errors():
        check_distinct(input_path, out)
        model = Compressor.decompress(input_path, layer or None)
        save_model(model, out, packed=packed)

    console.print(
        f"[green]✓[/green] Decoded {model.num_layers} layer(s), "
        f"{model.total_weights} weights -> {out}"
    )
