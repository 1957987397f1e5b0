"""Main CLI application for RIQ."""

from __future__ import annotations

import logging
from typing import Annotated, Optional

import typer
from rich.console import Console
from rich.logging import RichHandler

from riq import __version__

from .commands import analyze, compress, decompress, inspect_cmd, sweep, synth
from .commands.config_cmd import config_app


def version_callback(value: bool) -> None:
    """Print version and exit."""
    if value:
        print(f"riq v{__version__}")
        raise typer.Exit()


app = typer.Typer(
    name="riq",
    help="Rotation-invariant quantization and rANS compression of layered weights",
    no_args_is_help=True,
    context_settings={"help_option_names": ["-h", "--help"]},
)

console = Console()

# Register commands
app.command(name="compress")(compress.compress_model)
app.command(name="decompress")(decompress.decompress_archive)
app.command(name="sweep")(sweep.sweep_model)
app.command(name="analyze")(analyze.analyze_model)
app.command(name="synth")(synth.synth)
app.command(name="calib")(synth.calib)
app.command(name="inspect")(inspect_cmd.inspect_archive)

# Register sub-apps
app.add_typer(config_app, name="config")


def setup_logging(verbose: bool) -> None:
    """Route the ``riq`` loggers through a RichHandler on stderr."""
    logger = logging.getLogger("riq")
    logger.handlers.clear()
    handler = RichHandler(console=Console(stderr=True), show_path=False, show_time=False)
    handler.setFormatter(logging.Formatter("%(message)s"))
    logger.addHandler(handler)
    logger.setLevel(logging.DEBUG if verbose else logging.WARNING)
    logger.propagate = False


@app.callback()
def main(
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Log every search evaluation"),
    version: Annotated[
        Optional[bool],
        typer.Option(
            "--version",
            "-V",
            help="Show version information and exit.",
            callback=version_callback,
            is_eager=True,
        ),
    ] = None,
) -> None:
    """RIQ - compress layered weight models to a deviation budget."""
    setup_logging(verbose)


@app.command()
def version() -> None:
    """Show version information."""
    console.print(f"riq v{__version__}")


if __name__ == "__main__":
    app()
