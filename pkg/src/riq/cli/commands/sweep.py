"""Sweep command."""

from __future__ import annotations

from pathlib import Path
from typing import Optional

import typer

from ..common import calibration_for, check_distinct, console, handle_errors


def sweep_model(
    model: Path = typer.Option(..., "--model", "-m", help="Model container (.riqm)"),
    out: Path = typer.Option(Path("sweep.csv"), "--out", "-o", help="CSV to write"),
    grid: Optional[str] = typer.Option(
        None, "--grid", "-g", help="lo:hi:n log-spaced k grid (default: the k bounds)"
    ),
    eps0: Optional[float] = typer.Option(None, "--eps0", help="Bin-width floor eps0 (0 allowed)"),
    calib: Optional[Path] = typer.Option(None, "--calib", help="Calibration file"),
    gauss_calib: Optional[str] = typer.Option(
        None, "--gauss-calib", help="Gaussian calibration as N,SEED"
    ),
    precision: Optional[int] = typer.Option(None, "--precision", help="rANS precision bits"),
) -> None:
    """Quantize at every k of a grid and write sweep.csv."""
    from ...analysis.reports import sweep_frame, write_csv
    from ...analysis.sweep import default_grid, grid_bounds, parse_grid, sweep
    from ...config import get_config
    from ...storage.container import load_model

    config = get_config()
    with handle_errors():
        check_distinct(model, out, calib)
        source = load_model(model)
        calibration = calibration_for(source, calib, gauss_calib)
        floor = config.get_eps0(eps0)
        bounds = grid_bounds(source, floor)
        k_grid = (
            parse_grid(grid)
            if grid
            else default_grid(bounds, config.resolve("analysis.grid_points"))
        )
        points = sweep(
            source,
            calibration,
            k_grid,
            floor,
            bounds=bounds,
            precision=config.get_precision(precision),
        )
        write_csv(sweep_frame(points), out)

    console.print(f"[green]✓[/green] {len(points)} sweep point(s) -> {out}")
