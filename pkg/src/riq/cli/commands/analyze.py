"""Analyze command."""

from __future__ import annotations

from pathlib import Path
from typing import Optional

import typer
from rich.table import Table

from ..common import calibration_for, console, handle_errors, parse_int_list


def analyze_model(
    model: Path = typer.Option(..., "--model", "-m", help="Model container (.riqm)"),
    out: Path = typer.Option(..., "--out", "-o", help="Directory for the CSV reports"),
    calib: Optional[Path] = typer.Option(None, "--calib", help="Calibration file"),
    gauss_calib: Optional[str] = typer.Option(
        None, "--gauss-calib", help="Gaussian calibration as N,SEED"
    ),
    eps0: Optional[float] = typer.Option(
        None, "--eps0", help="Floor for the k bounds, layers.csv and the RIQ baseline"
    ),
    sweep_eps0: float = typer.Option(
        0.0, "--sweep-eps0", help="Floor used inside the sweep (0 = pure 1/k regime)"
    ),
    points: Optional[int] = typer.Option(None, "--points", "-n", help="Sweep grid points"),
    bits: str = typer.Option("4,5,6", "--bits", help="Uniform baseline bit widths"),
    uniform: bool = typer.Option(True, "--uniform/--no-uniform", help="Run the uniform baseline"),
) -> None:
    """Sweep the high-rate half of the k bounds, fit a/k^2 and compare with uniform.

    Writes sweep.csv, fit.csv, layers.csv and (unless --no-uniform)
    uniform.csv into the output directory.
    """
    from ...analysis import compare_uniform, default_grid, fit_sweep, sweep
    from ...analysis.reports import (
        fit_frame,
        layers_frame,
        sweep_frame,
        uniform_frame,
        write_csv,
    )
    from ...config import get_config
    from ...core.compressor import build_archive, layer_stats
    from ...core.quantizer import quantize_model
    from ...core.search import k_bounds
    from ...models.quantized import QuantConfig
    from ...storage.container import load_model

    config = get_config()
    with handle_errors():
        source = load_model(model)
        calibration = calibration_for(source, calib, gauss_calib)
        floor = config.get_eps0(eps0)
        precision = config.get_precision()
        bounds = k_bounds(source, floor)
        grid = default_grid(
            bounds, points or config.resolve("analysis.grid_points"), upper_half=True
        )
        sweep_points = sweep(
            source, calibration, grid, sweep_eps0, bounds=bounds, precision=precision
        )
        fit = fit_sweep(sweep_points) if len(sweep_points) >= 3 else None

        qmodel = quantize_model(source, QuantConfig(k=grid[0], eps0=floor))
        stats = layer_stats(source, qmodel, build_archive(qmodel, precision=precision))

        out.mkdir(parents=True, exist_ok=True)
        write_csv(sweep_frame(sweep_points), out / "sweep.csv")
        write_csv(layers_frame(stats), out / "layers.csv")
        if fit is not None:
            write_csv(fit_frame(fit), out / "fit.csv")

        baseline = []
        if uniform:
            bit_grid = parse_int_list(bits, "--bits")
            baseline = compare_uniform(
                source,
                calibration,
                bit_grid,
                floor,
                stop_threshold=config.get_stop_threshold(),
                precision=precision,
            )
            write_csv(uniform_frame(baseline), out / "uniform.csv")

    if fit is not None:
        console.print(
            f"[bold]Fit[/bold] deviation = a/k^2: a = {fit.a:.6g}, r2 = {fit.r_squared:.4f} "
            f"over k in [{fit.k_low:.2f}, {fit.k_high:.2f}]"
        )
    else:
        console.print("[dim]Fewer than 3 sweep points; no fit[/dim]")

    if baseline:
        table = Table(title="RIQ vs uniform at matched deviation")
        table.add_column("Bits", justify="right")
        table.add_column("Deviation", justify="right")
        table.add_column("Uniform ratio", justify="right")
        table.add_column("RIQ ratio", justify="right", style="green")
        for point in baseline:
            table.add_row(
                str(point.bits),
                f"{point.deviation:.3g}",
                f"x{point.actual_ratio:.2f}" if point.actual_ratio else "-",
                f"x{point.riq_actual_ratio:.2f}" if point.riq_actual_ratio else "-",
            )
        console.print(table)
    console.print(f"[green]✓[/green] Reports written to {out}")
