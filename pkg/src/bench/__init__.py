"""Benchmark harness, synthetic workloads and invariant suites."""

from .harness import bench_cache_build, bench_encrypt, cache_growth_is_linear, fl_round, make_rngs
from .verify import SUITES, verify
from .workloads import MODEL_PRESETS, WORKLOAD_PRESETS, model_size, synth_tensor, synth_weights, workload_spec

__all__ = [
    "MODEL_PRESETS",
    "SUITES",
    "WORKLOAD_PRESETS",
    "bench_cache_build",
    "bench_encrypt",
    "cache_growth_is_linear",
    "fl_round",
    "make_rngs",
    "model_size",
    "synth_tensor",
    "synth_weights",
    "verify",
    "workload_spec",
]
