"""Helpers shared by the CLI commands."""

from __future__ import annotations

from collections.abc import Iterator
from contextlib import contextmanager
from pathlib import Path

import typer
from rich.console import Console

from ..errors import RiqError
from ..models.calibration import CalibrationSet
from ..models.network import Model

console = Console()

EXIT_ERROR = 1
EXIT_UNSATISFIABLE = 2


@contextmanager
def handle_errors() -> Iterator[None]:
    """Turn domain and validation errors into a one-line diagnostic and exit 1."""
    try:
        yield
    except RiqError as e:
        console.print(f"[red]{e.code}: {e}[/red]", markup=True, highlight=False)
        raise typer.Exit(EXIT_ERROR)
    except ValueError as e:
        console.print(f"[red]InvalidArgument: {e}[/red]", highlight=False)
        raise typer.Exit(EXIT_ERROR)


def fail(message: str) -> None:
    console.print(f"[red]Error:[/red] {message}", highlight=False)
    raise typer.Exit(EXIT_ERROR)


def parse_gauss_calib(text: str) -> tuple[int, int]:
    """``N,SEED`` -> (count, seed)."""
    parts = text.split(",")
    if len(parts) != 2:
        raise ValueError(f"--gauss-calib expects N,SEED, got '{text}'")
    count, seed = int(parts[0]), int(parts[1])
    if count < 1 or seed < 0:
        raise ValueError(f"--gauss-calib needs N >= 1 and SEED >= 0, got '{text}'")
    return count, seed


def parse_int_list(text: str, option: str) -> list[int]:
    try:
        values = [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise ValueError(f"{option} expects comma-separated integers, got '{text}'") from None
    if not values:
        raise ValueError(f"{option} is empty")
    return values


def calibration_for(
    model: Model, calib: Path | None, gauss_calib: str | None
) -> CalibrationSet:
    """Calibration from ``--calib``, ``--gauss-calib`` or the configured Gaussian default."""
    from ..config import get_config
    from ..core.pipeline import resolve_calibration

    if calib is not None and gauss_calib is not None:
        raise ValueError("Use either --calib or --gauss-calib, not both")
    config = get_config()
    count = config.resolve("calib.count")
    seed = config.resolve("calib.seed")
    if gauss_calib is not None:
        count, seed = parse_gauss_calib(gauss_calib)
    return resolve_calibration(model, calib, count=count, seed=seed)


def check_distinct(*paths: Path | None) -> None:
    resolved = [p.resolve() for p in paths if p is not None]
    if len(set(resolved)) != len(resolved):
        raise ValueError("Input and output paths must be distinct")
