"""Data models for caches, tensors, benchmarks and verification."""

from .bench_models import (
    AdditionCounts,
    AggregationVerdict,
    BenchReport,
    CacheBuildPoint,
    CacheParams,
    FlRoundSpec,
    InvariantCheck,
    RadixCostProfile,
    TimingStats,
    VerifySummary,
    WorkloadSpec,
)
from .cache_models import AdditionCounter, RadixDigits, ZeroMask
from .tensor_models import QuantMode, QuantParams, TensorCipher, TensorPlain

__all__ = [
    "AdditionCounter",
    "AdditionCounts",
    "AggregationVerdict",
    "BenchReport",
    "CacheBuildPoint",
    "CacheParams",
    "FlRoundSpec",
    "InvariantCheck",
    "QuantMode",
    "QuantParams",
    "RadixCostProfile",
    "RadixDigits",
    "TensorCipher",
    "TensorPlain",
    "TimingStats",
    "VerifySummary",
    "WorkloadSpec",
    "ZeroMask",
]
