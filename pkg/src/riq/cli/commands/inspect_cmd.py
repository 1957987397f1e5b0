"""Inspect command."""

from __future__ import annotations

from pathlib import Path

import typer
from rich.table import Table

from ..common import console, handle_errors


def inspect_archive(
    input_path: Path = typer.Option(..., "--in", "-i", help="Archive to read (.rqz)"),
) -> None:
    """Show the per-layer records of an archive."""
    from ...storage.archive import read_archive

    with handle_errors():
        archive = read_archive(input_path)

    table = Table(title=f"{input_path.name} (v{archive.version})")
    table.add_column("Layer", style="cyan")
    table.add_column("n", justify="right")
    table.add_column("Delta", justify="right")
    table.add_column("Alphabet", justify="right")
    table.add_column("Precision", justify="right")
    table.add_column("Stream bytes", justify="right")
    table.add_column("Bits/symbol", justify="right", style="green")
    for record in archive.records:
        table.add_row(
            record.name,
            str(record.n),
            f"{record.delta:.6g}",
            str(record.table.size),
            str(record.table.precision),
            str(len(record.stream)),
            f"{record.bits_per_symbol:.3f}",
        )
    console.print(table)
    ratio = 32 * archive.total_symbols / (8 * archive.coded_bytes)
    console.print(
        f"{archive.coded_bytes} coded bytes, "
        f"{archive.total_bytes - archive.coded_bytes} raw extras bytes, ratio x{ratio:.2f}"
    )
