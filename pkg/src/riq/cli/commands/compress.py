"""Compress command."""

from __future__ import annotations

from pathlib import Path
from typing import Optional

import typer
from rich.table import Table

from ..common import (
    EXIT_UNSATISFIABLE,
    calibration_for,
    check_distinct,
    console,
    fail,
    handle_errors,
)


def compress_model(
    model: Path = typer.Option(..., "--model", "-m", help="Model container (.riqm)"),
    out: Path = typer.Option(..., "--out", "-o", help="Archive to write (.rqz)"),
    calib: Optional[Path] = typer.Option(None, "--calib", help="Calibration file"),
    gauss_calib: Optional[str] = typer.Option(
        None, "--gauss-calib", help="Gaussian calibration as N,SEED"
    ),
    deviation: Optional[float] = typer.Option(
        None, "--deviation", "-D", help="Deviation budget D in (0, 2]"
    ),
    target_ratio: Optional[float] = typer.Option(
        None, "--target-ratio", "-r", help="Target compression ratio (> 1)"
    ),
    eps0: Optional[float] = typer.Option(None, "--eps0", help="Bin-width floor eps0"),
    eps0_policy: Optional[str] = typer.Option(
        None, "--eps0-policy", help="constant, per_layer_rbit or per_layer_fd"
    ),
    stop_threshold: Optional[float] = typer.Option(
        None, "--stop-threshold", help="Search stop threshold (> 1)"
    ),
    precision: Optional[int] = typer.Option(None, "--precision", help="rANS precision bits"),
    report: Optional[Path] = typer.Option(
        None, "--report", help="Report JSON (default: archive path with .json)"
    ),
    layers_csv: Optional[Path] = typer.Option(None, "--layers-csv", help="Write layers.csv"),
    trace_csv: Optional[Path] = typer.Option(None, "--trace", help="Write the search trace CSV"),
) -> None:
    """Search k for a deviation budget (or target ratio) and write an archive.

    Exits 2 when the budget cannot be met; the best-effort archive and report
    are still written.
    """
    from ...analysis.reports import layers_frame, write_csv
    from ...core.pipeline import Compressor
    from ...storage.container import load_model

    if (deviation is None) == (target_ratio is None):
        fail("Give exactly one of --deviation or --target-ratio")
    report = report or out.with_suffix(".json")

    with handle_errors():
        check_distinct(model, out, report, calib, layers_csv, trace_csv)
        source = load_model(model)
        calibration = calibration_for(source, calib, gauss_calib)
        compressor = Compressor(
            eps0=eps0,
            eps0_policy=eps0_policy,
            stop_threshold=stop_threshold,
            precision=precision,
        )
        result = compressor.compress(
            source, calibration, deviation=deviation, target_ratio=target_ratio
        )
        compressor.save(result, out)
        summary = compressor.report(result, calibration)
        report.parent.mkdir(parents=True, exist_ok=True)
        report.write_text(summary.model_dump_json(indent=2), encoding="utf-8")
        if layers_csv is not None:
            write_csv(layers_frame(result.layers), layers_csv)
        if trace_csv is not None:
            result.trace.write_csv(trace_csv)

    table = Table(title=f"Compressed {model.name}")
    table.add_column("Metric", style="cyan")
    table.add_column("Value", style="green")
    table.add_row("k", f"{summary.chosen_k:.4f}")
    table.add_row("deviation", f"{summary.deviation:.6g}")
    table.add_row("ratio", f"x{summary.actual_ratio:.2f} (estimate x{summary.est_ratio:.2f})")
    table.add_row("bits/weight", f"{summary.bits_per_weight:.3f}")
    table.add_row("evaluations", str(summary.evaluations))
    console.print(table)
    console.print(f"[green]✓[/green] Wrote {out} and {report}")

    if not summary.satisfied:
        what = "deviation budget" if summary.mode == "deviation" else "target ratio"
        console.print(
            f"[yellow]Unsatisfiable:[/yellow] {what} not met; best-effort archive written"
        )
        raise typer.Exit(EXIT_UNSATISFIABLE)
