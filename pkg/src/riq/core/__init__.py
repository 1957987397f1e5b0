"""Core logic for RIQ: inference, quantization, search and compression."""

from .compressor import build_archive, compression_ratio, estimate_ratio, reconstruct_model
from .forward import cosine_deviation, forward, layer_distortion
from .pipeline import CompressionResult, Compressor
from .quantizer import dequantize, quantize_model, quantize_uniform
from .search import SearchBounds, SearchTrace, k_bounds, rate_targeted_search, riq_search

__all__ = [
    "CompressionResult",
    "Compressor",
    "SearchBounds",
    "SearchTrace",
    "build_archive",
    "compression_ratio",
    "cosine_deviation",
    "dequantize",
    "estimate_ratio",
    "forward",
    "k_bounds",
    "layer_distortion",
    "quantize_model",
    "quantize_uniform",
    "rate_targeted_search",
    "reconstruct_model",
    "riq_search",
]
