"""
Timed comparisons of direct and cached encryption.

All timings are wall-clock ``time.perf_counter`` seconds. Warm-up runs are
executed but never recorded.
"""

from __future__ import annotations

import logging
import random
import time
from concurrent.futures import Executor
from contextlib import nullcontext
from typing import Callable, ContextManager, List, Optional, Sequence, Tuple

import numpy as np

from src.bench.workloads import synth_tensor, synth_weights
from src.core.radix_cache import RadixCache, build_cache
from src.core.tensor_codec import (
    aggregate_tensors,
    decrypt_tensor,
    dequantize,
    encrypt_tensor,
    encrypt_tensor_direct,
    encryption_pool,
    quantize,
)
from src.errors import ConfigurationError
from src.models.bench_models import (
    AdditionCounts,
    AggregationVerdict,
    BenchReport,
    CacheBuildPoint,
    CacheParams,
    FlRoundSpec,
    TimingStats,
    WorkloadSpec,
)
from src.models.cache_models import AdditionCounter
from src.models.tensor_models import QuantParams, TensorCipher, TensorPlain
from src.schemes import SchemeKeyPair, get_scheme

logger = logging.getLogger(__name__)

MIN_REPETITIONS = 3
# Samples shorter than this many timer ticks are flagged as unreliable.
TIMER_RESOLUTION_FACTOR = 100
# Largest tolerated spread of seconds-per-entry across a cache build sweep.
LINEARITY_TOLERANCE = 3.0


def make_rngs(seed: Optional[int]) -> Tuple[random.Random, np.random.Generator]:
    """Cryptographic and workload random sources; seeded runs are reproducible."""
    if seed is None:
        return random.SystemRandom(), np.random.default_rng()
    return random.Random(seed), np.random.default_rng(seed)


def _time(fn: Callable[[], object]) -> Tuple[float, object]:
    start = time.perf_counter()
    result = fn()
    return time.perf_counter() - start, result


def _check_repetitions(repetitions: int) -> None:
    if repetitions < MIN_REPETITIONS:
        raise ConfigurationError(f"repetitions must be >= {MIN_REPETITIONS}, got {repetitions}")


def timer_warnings(stats: TimingStats, label: str) -> List[str]:
    resolution = time.get_clock_info("perf_counter").resolution
    if stats.samples and min(stats.samples) < TIMER_RESOLUTION_FACTOR * resolution:
        return [f"{label}: shortest sample {min(stats.samples):.3g}s is near the timer resolution {resolution:.3g}s"]
    return []


def _worker_pool(cache: RadixCache, workers: int) -> ContextManager[Optional[Executor]]:
    """Pool shared by every timed repetition; started before the first one."""
    if workers > 1:
        return encryption_pool(cache, workers)
    return nullcontext(None)


def bench_encrypt(
    spec: WorkloadSpec,
    cache_params: CacheParams,
    key_bits: int,
    scheme: str = "paillier",
    repetitions: int = MIN_REPETITIONS,
    warmup: int = 1,
    seed: Optional[int] = None,
    workers: int = 1,
    tensors: Optional[Sequence[TensorPlain]] = None,
    cache: Optional[RadixCache] = None,
) -> BenchReport:
    """
    Time direct against cached encryption of one workload.

    Args:
        spec: Workload shape, sparsity and sample count
        cache_params: Radix cache configuration
        key_bits: Key size when a fresh key is generated
        scheme: Scheme id when a fresh key is generated
        repetitions: Measured repetitions (>= 3)
        warmup: Unrecorded repetitions run first
        seed: Seeds both random sources; None falls back to spec.seed, then
            to system entropy
        workers: Worker processes for cached encryption
        tensors: Pre-built tensors replacing the synthetic ones
        cache: Existing cache; its key is used and its build is not timed

    Returns:
        BenchReport with cache-build, direct and cached timing stats
    """
    _check_repetitions(repetitions)
    seed = seed if seed is not None else spec.seed
    rng, np_rng = make_rngs(seed)

    cache_build = None
    if cache is None:
        keypair = get_scheme(scheme).keygen(key_bits, rng)
        elapsed, cache = _time(
            lambda: build_cache(
                keypair.public_key,
                cache_params.radix,
                cache_params.bit_width,
                cache_params.zero_pool_size,
                rng,
                cache_params.min_zero_inclusions,
            )
        )
        cache_build = TimingStats(samples=[elapsed])
    public_key = cache.public_key

    if tensors is None:
        tensors = [synth_tensor(spec, np_rng) for _ in range(spec.sample_count)]
    tensors = list(tensors)
    element_count = sum(t.size for t in tensors)
    logger.info(
        "bench-encrypt %s: %d tensor(s), %d elements, %d nonzero",
        spec.name,
        len(tensors),
        element_count,
        sum(t.nonzero_count for t in tensors),
    )

    def run_direct() -> None:
        for t in tensors:
            encrypt_tensor_direct(public_key, t, rng)

    with _worker_pool(cache, workers) as pool:

        def run_cached(counter: AdditionCounter) -> None:
            for t in tensors:
                encrypt_tensor(cache, t, rng, counter, workers, cache_params.scalar_fast_path, pool)

        for _ in range(warmup):
            run_direct()
            run_cached(AdditionCounter())

        direct, cached = [], []
        counter = AdditionCounter()
        for rep in range(repetitions):
            elapsed, _ = _time(run_direct)
            direct.append(elapsed)
            # Counts are kept from the last repetition only.
            counter = AdditionCounter()
            elapsed, _ = _time(lambda: run_cached(counter))
            cached.append(elapsed)
            logger.debug("Repetition %d: direct %.4fs, cached %.4fs", rep, direct[-1], cached[-1])

    direct_stats = TimingStats(samples=direct)
    cached_stats = TimingStats(samples=cached)
    report = BenchReport(
        run="bench-encrypt",
        workload=spec.name,
        scheme=public_key.scheme_id,
        key_bits=public_key.key_bits,
        radix=cache.radix,
        bit_width=cache.bit_width,
        zero_pool_size=cache.zero_pool_size,
        min_zero_inclusions=cache.min_zero_inclusions,
        scalar_fast_path=cache_params.scalar_fast_path,
        workers=workers,
        repetitions=repetitions,
        warmup=warmup,
        seed=seed,
        element_count=element_count,
        cache_build=cache_build,
        direct_encrypt=direct_stats,
        cached_encrypt=cached_stats,
        counters=AdditionCounts(digit_join=counter.digit_join, randomizer=counter.randomizer),
        warnings=timer_warnings(direct_stats, "direct") + timer_warnings(cached_stats, "cached"),
        metadata={
            "shape": "x".join(str(dim) for dim in spec.shape),
            "nonempty_rate": f"{spec.nonempty_rate:.4f}",
            "samples": str(len(tensors)),
            "cache_fingerprint": cache.fingerprint,
        },
    )
    for warning in report.warnings:
        logger.warning(warning)
    return report


def cache_growth_is_linear(points: Sequence[CacheBuildPoint], tolerance: float = LINEARITY_TOLERANCE) -> bool:
    """
    True when mean build time does not shrink as the cache grows and the
    per-entry cost stays within ``tolerance`` of its smallest value.
    """
    ordered = sorted(points, key=lambda p: p.entries)
    per_entry = [p.seconds_per_entry for p in ordered if p.seconds_per_entry > 0]
    if len(per_entry) < 2:
        return True
    if max(per_entry) > tolerance * min(per_entry):
        return False
    means = [p.timing.mean for p in ordered]
    # One entry's worth of slack absorbs jitter between neighbouring widths.
    slack = min(per_entry)
    return all(later >= earlier - slack for earlier, later in zip(means, means[1:]))


def bench_cache_build(
    radix: int,
    bit_widths: Sequence[int],
    zero_pool_size: int,
    key_bits: int,
    scheme: str = "paillier",
    repetitions: int = MIN_REPETITIONS,
    warmup: int = 1,
    seed: Optional[int] = None,
    min_zero_inclusions: int = 1,
) -> BenchReport:
    """Time cache construction for each bit width under one key."""
    _check_repetitions(repetitions)
    if not bit_widths:
        raise ConfigurationError("At least one bit width is required")
    rng, _ = make_rngs(seed)
    keypair = get_scheme(scheme).keygen(key_bits, rng)

    def build(bit_width: int) -> RadixCache:
        return build_cache(keypair.public_key, radix, bit_width, zero_pool_size, rng, min_zero_inclusions)

    points: List[CacheBuildPoint] = []
    for bit_width in sorted(bit_widths):
        for _ in range(warmup):
            build(bit_width)
        samples = []
        entries = 0
        for _ in range(repetitions):
            elapsed, cache = _time(lambda: build(bit_width))
            samples.append(elapsed)
            entries = cache.entry_count
        points.append(CacheBuildPoint(bit_width=bit_width, entries=entries, timing=TimingStats(samples=samples)))
        logger.info("Cache build B=%d: %d entries, mean %.4fs", bit_width, entries, points[-1].timing.mean)

    linear = cache_growth_is_linear(points)
    warnings = [w for p in points for w in timer_warnings(p.timing, f"cache build B={p.bit_width}")]
    if not linear:
        warnings.append("Cache build time does not grow linearly with the entry count")
    for warning in warnings:
        logger.warning(warning)

    return BenchReport(
        run="bench-cache-build",
        scheme=keypair.scheme_id,
        key_bits=keypair.key_bits,
        radix=radix,
        bit_width=max(bit_widths),
        zero_pool_size=zero_pool_size,
        min_zero_inclusions=min_zero_inclusions,
        repetitions=repetitions,
        warmup=warmup,
        seed=seed,
        cache_build_sweep=points,
        warnings=warnings,
        metadata={"linear_growth": str(linear).lower()},
    )


def _aggregate_verdict(
    keypair: SchemeKeyPair,
    cached_outputs: Sequence,
    direct_outputs: Sequence,
    plains: Sequence[TensorPlain],
    updates: Sequence[np.ndarray],
    spec: FlRoundSpec,
) -> AggregationVerdict:
    public_key, secret_key = keypair.public_key, keypair.secret_key
    expected = np.sum([np.asarray(t.values, dtype=np.int64) for t in plains], axis=0)

    cached_sum = decrypt_tensor(secret_key, aggregate_tensors(public_key, cached_outputs))
    direct_sum = decrypt_tensor(secret_key, aggregate_tensors(public_key, direct_outputs))
    got = np.asarray(cached_sum.values, dtype=np.int64)
    direct_got = np.asarray(direct_sum.values, dtype=np.int64)

    float_sum = np.sum(updates, axis=0)
    return AggregationVerdict(
        participants=len(plains),
        model_size=spec.model_size,
        exact=bool(np.array_equal(got, expected)),
        direct_exact=bool(np.array_equal(direct_got, expected)),
        mismatches=int(np.count_nonzero(got != expected)),
        max_abs_error=float(np.max(np.abs(dequantize(cached_sum).ravel() - float_sum))),
    )


def fl_round(
    spec: FlRoundSpec,
    cache_params: CacheParams,
    key_bits: int,
    scheme: str = "paillier",
    repetitions: int = MIN_REPETITIONS,
    warmup: int = 1,
    workers: int = 1,
    quant: Optional[QuantParams] = None,
) -> BenchReport:
    """
    Simulate one aggregation round.

    ``spec.participants`` clients each quantize a random weight update
    (signed-offset, 16 bits by default) and encrypt it directly and through
    one shared cache. The server sums the ciphertexts; decryption after
    removing ``participants * offset`` must equal the plaintext sum.

    Raises:
        CapacityError: if participants * 2**B could wrap the plaintext modulus
    """
    _check_repetitions(repetitions)
    quant = quant or QuantParams.for_weights()
    seed = spec.seed
    rng, np_rng = make_rngs(seed)
    participants = spec.participants

    keypair = get_scheme(scheme).keygen(key_bits, rng)
    elapsed, cache = _time(
        lambda: build_cache(
            keypair.public_key,
            cache_params.radix,
            quant.bit_width,
            cache_params.zero_pool_size,
            rng,
            cache_params.min_zero_inclusions,
            fan_in=participants,
        )
    )
    cache_build = TimingStats(samples=[elapsed])

    updates = [synth_weights(spec.model_size, np_rng) for _ in range(participants)]
    plains = [quantize(update, quant) for update in updates]
    logger.info(
        "fl-round: %d of %d clients, %d weights each, %s",
        participants,
        spec.client_count,
        spec.model_size,
        spec.distribution,
    )

    def run_cached(counter: AdditionCounter, pool: Optional[Executor]) -> List[TensorCipher]:
        return [
            encrypt_tensor(cache, t, rng, counter, workers, cache_params.scalar_fast_path, pool) for t in plains
        ]

    with _worker_pool(cache, workers) as pool:
        for _ in range(warmup):
            encrypt_tensor_direct(keypair.public_key, plains[0], rng)
            encrypt_tensor(cache, plains[0], rng, workers=workers, pool=pool)

        direct, cached = [], []
        direct_outputs, cached_outputs = [], []
        counter = AdditionCounter()
        for _ in range(repetitions):
            elapsed, direct_outputs = _time(
                lambda: [encrypt_tensor_direct(keypair.public_key, t, rng) for t in plains]
            )
            direct.append(elapsed)
            counter = AdditionCounter()
            elapsed, cached_outputs = _time(lambda: run_cached(counter, pool))
            cached.append(elapsed)

    verdict = _aggregate_verdict(keypair, cached_outputs, direct_outputs, plains, updates, spec)
    if not verdict.exact:
        logger.warning("Aggregate mismatch in %d of %d positions", verdict.mismatches, spec.model_size)

    direct_stats = TimingStats(samples=direct)
    cached_stats = TimingStats(samples=cached)
    return BenchReport(
        run="fl-round",
        workload=spec.model or "raw",
        scheme=keypair.scheme_id,
        key_bits=keypair.key_bits,
        radix=cache.radix,
        bit_width=cache.bit_width,
        zero_pool_size=cache.zero_pool_size,
        min_zero_inclusions=cache.min_zero_inclusions,
        scalar_fast_path=cache_params.scalar_fast_path,
        workers=workers,
        repetitions=repetitions,
        warmup=warmup,
        seed=seed,
        element_count=participants * spec.model_size,
        cache_build=cache_build,
        direct_encrypt=direct_stats,
        cached_encrypt=cached_stats,
        counters=AdditionCounts(digit_join=counter.digit_join, randomizer=counter.randomizer),
        aggregation=verdict,
        warnings=timer_warnings(direct_stats, "direct") + timer_warnings(cached_stats, "cached"),
        metadata={
            "client_count": str(spec.client_count),
            "fraction": str(spec.fraction),
            "participants": str(participants),
            "distribution": spec.distribution,
            "quant_scale": str(quant.scale),
        },
    )
