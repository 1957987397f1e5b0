"""CLI commands for RIQ."""

from . import analyze, compress, decompress, inspect_cmd, sweep, synth

__all__ = ["analyze", "compress", "decompress", "inspect_cmd", "sweep", "synth"]
