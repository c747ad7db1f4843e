"""Cache construction, tensor encoding and radix parametrization."""

from .engine import ChemEngine
from .parametrization import (
    auxiliary_g,
    cost_profile,
    cost_table,
    measured_cost,
    monotonicity_check,
    optimal_radix,
    predicted_cost,
)
from .radix_cache import (
    RadixCache,
    addition_count,
    build_cache,
    cache_top_index,
    cached_encrypt,
    digits,
    draw_zero_mask,
)
from .tensor_codec import (
    aggregate_tensors,
    decrypt_tensor,
    dequantize,
    encrypt_tensor,
    encrypt_tensor_direct,
    encryption_pool,
    quantize,
)

__all__ = [
    "ChemEngine",
    "RadixCache",
    "addition_count",
    "aggregate_tensors",
    "auxiliary_g",
    "build_cache",
    "cache_top_index",
    "cached_encrypt",
    "cost_profile",
    "cost_table",
    "decrypt_tensor",
    "dequantize",
    "digits",
    "draw_zero_mask",
    "encrypt_tensor",
    "encrypt_tensor_direct",
    "encryption_pool",
    "measured_cost",
    "monotonicity_check",
    "optimal_radix",
    "predicted_cost",
    "quantize",
]
