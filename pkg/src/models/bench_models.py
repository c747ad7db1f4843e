"""Benchmark, parametrization and verification records."""

import math
from typing import Dict, List, Literal, Optional

import numpy as np
from pydantic import BaseModel, Field, computed_field, model_validator


class CacheParams(BaseModel):
    """Radix cache configuration."""

    radix: int = Field(2, ge=2, description="Radix r")
    bit_width: int = Field(8, ge=1, description="Message bit width B")
    zero_pool_size: int = Field(64, ge=1, description="Number of cached zero ciphertexts n_z")
    min_zero_inclusions: int = Field(1, ge=0, description="Floor on randomizers per ciphertext")
    scalar_fast_path: bool = Field(False, description="Use scalar multiplication for repeated digits")

    @model_validator(mode="after")
    def _floor_within_pool(self) -> "CacheParams":
        if self.min_zero_inclusions > self.zero_pool_size:
            raise ValueError("min_zero_inclusions cannot exceed zero_pool_size")
        return self


class WorkloadSpec(BaseModel):
    """Synthetic tensor workload matched to a dataset's shape and sparsity."""

    name: str
    shape: List[int] = Field(..., min_length=1)
    nonempty_rate: float = Field(..., ge=0.0, le=1.0, description="Fraction of nonzero elements")
    bit_width: int = Field(8, ge=1, le=32)
    value_distribution: Literal["uniform"] = Field(
        "uniform", description="Nonzero values drawn uniformly from [1, 2**B)"
    )
    sample_count: int = Field(1, ge=1)
    seed: Optional[int] = None

    @property
    def size(self) -> int:
        return int(np.prod(self.shape))


class FlRoundSpec(BaseModel):
    """One round of federated aggregation at desk scale."""

    client_count: int = Field(30, ge=1)
    fraction: float = Field(0.1, gt=0.0, le=1.0)
    model_size: int = Field(100, ge=1, description="Flat weight count per client")
    distribution: Literal["iid", "non-iid"] = Field("iid", description="Metadata only")
    model: Optional[str] = Field(None, description="Model preset name, if any")
    seed: Optional[int] = None

    @property
    def participants(self) -> int:
        return int(round(self.client_count * self.fraction))

    @model_validator(mode="after")
    def _at_least_one_participant(self) -> "FlRoundSpec":
        if self.participants < 1:
            raise ValueError(
                f"{self.client_count} clients at fraction {self.fraction} selects no participant"
            )
        return self


class TimingStats(BaseModel):
    """Raw wall-clock samples (seconds) with their mean and deviation."""

    samples: List[float] = Field(default_factory=list)

    @computed_field
    @property
    def mean(self) -> float:
        return float(np.mean(self.samples)) if self.samples else 0.0

    @computed_field
    @property
    def std(self) -> float:
        return float(np.std(self.samples, ddof=1)) if len(self.samples) > 1 else 0.0


class AdditionCounts(BaseModel):
    digit_join: int = 0
    randomizer: int = 0


class CacheBuildPoint(BaseModel):
    bit_width: int
    entries: int = Field(..., description="Radix entries plus zero entries")
    timing: TimingStats

    @computed_field
    @property
    def seconds_per_entry(self) -> float:
        return self.timing.mean / self.entries if self.entries else 0.0


class AggregationVerdict(BaseModel):
    participants: int
    model_size: int
    exact: bool = Field(..., description="Cached aggregate equals the plaintext quantized sum")
    direct_exact: bool = Field(..., description="Directly encrypted aggregate equals the plaintext sum")
    mismatches: int = 0
    max_abs_error: float = Field(0.0, description="Largest dequantized deviation from the float sum")


class BenchReport(BaseModel):
    """Timing and configuration record for one harness run."""

    run: str
    workload: Optional[str] = None
    scheme: str
    key_bits: int
    radix: int
    bit_width: int
    zero_pool_size: int
    min_zero_inclusions: int = 1
    scalar_fast_path: bool = False
    workers: int = 1
    repetitions: int
    warmup: int = 0
    seed: Optional[int] = None
    element_count: int = 0
    cache_build: Optional[TimingStats] = None
    direct_encrypt: Optional[TimingStats] = None
    cached_encrypt: Optional[TimingStats] = None
    counters: AdditionCounts = Field(default_factory=AdditionCounts)
    cache_build_sweep: List[CacheBuildPoint] = Field(default_factory=list)
    aggregation: Optional[AggregationVerdict] = None
    warnings: List[str] = Field(default_factory=list)
    metadata: Dict[str, str] = Field(default_factory=dict)

    @computed_field
    @property
    def reduction_percent(self) -> Optional[float]:
        if not self.direct_encrypt or not self.cached_encrypt or self.direct_encrypt.mean <= 0:
            return None
        return 100.0 * (1.0 - self.cached_encrypt.mean / self.direct_encrypt.mean)

    def to_flat_rows(self) -> List[Dict[str, object]]:
        """One row per timed quantity and repetition, for CSV plotting."""
        base = {
            "run": self.run,
            "workload": self.workload,
            "scheme": self.scheme,
            "key_bits": self.key_bits,
            "radix": self.radix,
            "bit_width": self.bit_width,
            "zero_pool_size": self.zero_pool_size,
            "workers": self.workers,
        }
        rows: List[Dict[str, object]] = []
        for phase in ("cache_build", "direct_encrypt", "cached_encrypt"):
            stats = getattr(self, phase)
            if stats is None:
                continue
            for rep, seconds in enumerate(stats.samples):
                rows.append({**base, "phase": phase, "repetition": rep, "seconds": seconds})
        for point in self.cache_build_sweep:
            for rep, seconds in enumerate(point.timing.samples):
                rows.append(
                    {
                        **base,
                        "bit_width": point.bit_width,
                        "phase": "cache_build",
                        "repetition": rep,
                        "seconds": seconds,
                    }
                )
        return rows


class RadixCostProfile(BaseModel):
    """Predicted versus brute-force worst-case digit-join additions."""

    radix: int = Field(..., ge=2)
    max_plain: int = Field(..., ge=1)
    k: int = Field(..., ge=0, description="floor(log_r m)")
    predicted_worst_cost: float
    measured_worst_cost: int

    @computed_field
    @property
    def exact_form(self) -> bool:
        """True when m is one less than a power of the radix."""
        return self.max_plain == self.radix ** (self.k + 1) - 1

    @computed_field
    @property
    def matches(self) -> bool:
        if self.exact_form:
            return self.measured_worst_cost == round(self.predicted_worst_cost)
        return self.measured_worst_cost <= math.ceil(self.predicted_worst_cost - 1e-9)


class InvariantCheck(BaseModel):
    suite: str
    invariant: str
    passed: bool
    detail: str = ""


class VerifySummary(BaseModel):
    suites: List[str] = Field(default_factory=list)
    checks: List[InvariantCheck] = Field(default_factory=list)

    @computed_field
    @property
    def status(self) -> str:
        return "pass" if all(check.passed for check in self.checks) else "fail"

    @property
    def failures(self) -> List[InvariantCheck]:
        return [check for check in self.checks if not check.passed]
