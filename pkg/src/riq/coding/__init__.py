"""rANS entropy coding."""

from .rans import decode, encode
from .table import FrequencyTable, build_table

__all__ = ["FrequencyTable", "build_table", "decode", "encode"]
