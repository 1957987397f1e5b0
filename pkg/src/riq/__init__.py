"""RIQ - rotation-invariant quantization and entropy coding of layered weight models."""

from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("riq-compress")
except PackageNotFoundError:
    __version__ = "0.0.0"  # Development mode
