"""Exception hierarchy for RIQ.

Every domain error carries a short ``code`` that the CLI prints as the first
token of its one-line diagnostic.
"""

from __future__ import annotations


class RiqError(Exception):
    """Base class for all RIQ domain errors."""

    code = "RiqError"


# Model container / calibration files


class MissingFileError(RiqError):
    """Raised when a model, calibration or archive path does not exist."""

    code = "MissingFile"

    def __init__(self, path: object):
        self.path = path
        super().__init__(f"No such file or directory: {path}")


class ManifestMismatchError(RiqError):
    """Raised when a manifest disagrees with its blob or with itself."""

    code = "ManifestMismatch"


class NonFiniteWeightError(RiqError):
    """Raised when a weight or bias is NaN or infinite."""

    code = "NonFiniteWeight"

    def __init__(self, layer: str, count: int):
        self.layer = layer
        self.count = count
        super().__init__(f"Layer '{layer}' holds {count} non-finite value(s)")


class EmptyArchError(RiqError):
    code = "EmptyArch"


class IoFailureError(RiqError):
    code = "IoFailure"


# Forward engine


class ShapeMismatchError(RiqError):
    code = "ShapeMismatch"


class ZeroOutputNormError(RiqError):
    """Raised when a model maps a calibration sample to the zero vector."""

    code = "ZeroOutputNorm"

    def __init__(self, sample: int, which: str):
        self.sample = sample
        self.which = which
        super().__init__(f"The {which} model outputs the zero vector for sample {sample}")


class ZeroVectorError(RiqError):
    code = "ZeroVector"


# Quantizer


class NonPositiveDeltaError(RiqError):
    code = "NonPositiveDelta"


class ZeroNormLayerError(RiqError):
    code = "ZeroNormLayer"


class DegenerateRangeError(RiqError):
    code = "DegenerateRange"


class TooFewSamplesError(RiqError):
    code = "TooFewSamples"


class EmptyInputError(RiqError):
    code = "EmptyInput"


# Search


class Eps0OutOfRangeError(RiqError):
    code = "Eps0OutOfRange"


class BudgetOutOfRangeError(RiqError):
    code = "BudgetOutOfRange"


class UnsatisfiableError(RiqError):
    """Raised by strict searches when no k up to k_max meets the predicate.

    The best-effort result is attached so callers can still report it.
    """

    code = "Unsatisfiable"

    def __init__(self, message: str, result: object = None):
        self.result = result
        super().__init__(message)


# Entropy coder / archive


class AlphabetTooLargeError(RiqError):
    code = "AlphabetTooLarge"


class SymbolNotInTableError(RiqError):
    code = "SymbolNotInTable"


class CorruptStreamError(RiqError):
    code = "CorruptStream"


class MismatchError(RiqError):
    code = "Mismatch"


class BadMagicError(RiqError):
    code = "BadMagic"


class VersionUnsupportedError(RiqError):
    code = "VersionUnsupported"


class ChecksumMismatchError(RiqError):
    code = "ChecksumMismatch"


class UnknownLayerError(RiqError):
    code = "UnknownLayer"

    def __init__(self, name: str, available: list[str]):
        self.name = name
        self.available = available
        super().__init__(f"Unknown layer '{name}'. Available: {', '.join(available)}")


# Analysis


class DegenerateFitError(RiqError):
    code = "DegenerateFit"


class OutOfRegimeError(RiqError):
    code = "OutOfRegime"


class DimensionTooLargeError(RiqError):
    code = "DimensionTooLarge"


class InvalidGridError(RiqError):
    code = "InvalidGrid"


def attach_layer(error: RiqError, layer: str) -> RiqError:
    """Prefix an error's message with the layer it concerns, keeping its type."""
    error.layer = layer  # type: ignore[attr-defined]
    error.args = (f"Layer '{layer}': {error}",)
    return error
