"""Quantization and element-wise encryption of tensors."""

from __future__ import annotations

import logging
import math
import random
from concurrent.futures import Executor, ProcessPoolExecutor
from contextlib import ExitStack
from typing import List, Optional, Sequence, Tuple

import numpy as np
from numpy.typing import ArrayLike

from src.core.radix_cache import RadixCache, cached_encrypt
from src.errors import (
    CapacityError,
    KeyContextError,
    MalformedCiphertextError,
    QuantizationError,
    TensorDecryptionError,
)
from src.models.cache_models import AdditionCounter
from src.models.tensor_models import QuantParams, TensorCipher, TensorPlain
from src.schemes import Ciphertext, PublicKey, SecretKey, get_scheme

logger = logging.getLogger(__name__)

DIRECT_FINGERPRINT = "direct"
CHUNKS_PER_WORKER = 4


def quantize(tensor: ArrayLike, quant: QuantParams) -> TensorPlain:
    """
    Round real values onto the plaintext grid, clamping to [0, 2**B).

    Raises:
        QuantizationError: if any value is NaN or infinite
    """
    arr = np.asarray(tensor, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise QuantizationError("Cannot quantize non-finite values")

    q = np.rint(arr / quant.scale) + quant.offset
    q = np.clip(q, 0, quant.max_value).astype(np.int64)
    return TensorPlain(shape=list(arr.shape), values=q.ravel().tolist(), quant=quant)


def dequantize(t: TensorPlain) -> np.ndarray:
    """Map plaintext integers back to reals; removes fan_in * offset."""
    values = np.asarray(t.values, dtype=np.float64)
    return ((values - t.fan_in * t.quant.offset) * t.quant.scale).reshape(t.shape)


_WORKER_STATE: dict = {}

_ChunkJob = Tuple[List[int], np.random.SeedSequence, str, bool]


def _init_worker(cache: RadixCache) -> None:
    _WORKER_STATE["cache"] = cache


def encryption_pool(cache: RadixCache, workers: int) -> ProcessPoolExecutor:
    """
    Worker processes holding a copy of ``cache``.

    Pass the pool to encrypt_tensor to encrypt many tensors without paying
    process start-up and cache transfer per tensor. Use it as a context
    manager so the workers are shut down.
    """
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    return ProcessPoolExecutor(max_workers=workers, initializer=_init_worker, initargs=(cache,))


def _seed_from(seed_seq: np.random.SeedSequence) -> int:
    return int.from_bytes(seed_seq.generate_state(4).tobytes(), "big")


def _encrypt_chunk(job: _ChunkJob) -> Tuple[List[Ciphertext], int, int]:
    values, seed_seq, fingerprint, scalar_fast_path = job
    cache = _WORKER_STATE["cache"]
    if cache.fingerprint != fingerprint:
        raise KeyContextError(f"Worker pool holds cache {cache.fingerprint}, expected {fingerprint}")
    rng = random.Random(_seed_from(seed_seq))
    counter = AdditionCounter()
    out = [cached_encrypt(cache, value, rng, counter, scalar_fast_path) for value in values]
    return out, counter.digit_join, counter.randomizer


def _encrypt_parallel(
    cache: RadixCache,
    values: List[int],
    rng: random.Random,
    counter: AdditionCounter,
    workers: int,
    scalar_fast_path: bool,
    pool: Optional[Executor],
) -> List[Ciphertext]:
    chunk_size = max(1, math.ceil(len(values) / (workers * CHUNKS_PER_WORKER)))
    chunks = [values[i : i + chunk_size] for i in range(0, len(values), chunk_size)]
    # Seeds are split per chunk, not per worker, so output does not depend on scheduling.
    seeds = np.random.SeedSequence(rng.getrandbits(128)).spawn(len(chunks))
    jobs = [(chunk, seed, cache.fingerprint, scalar_fast_path) for chunk, seed in zip(chunks, seeds)]

    with ExitStack() as stack:
        if pool is None:
            pool = stack.enter_context(encryption_pool(cache, workers))
        ciphertexts: List[Ciphertext] = []
        for chunk_out, joins, randomizers in pool.map(_encrypt_chunk, jobs):
            ciphertexts.extend(chunk_out)
            counter.digit_join += joins
            counter.randomizer += randomizers
    return ciphertexts


def encrypt_tensor(
    cache: RadixCache,
    t: TensorPlain,
    rng: random.Random,
    counter: Optional[AdditionCounter] = None,
    workers: int = 1,
    scalar_fast_path: bool = False,
    pool: Optional[Executor] = None,
) -> TensorCipher:
    """
    Encrypt every element of ``t`` through the radix cache.

    Zero elements skip digit assembly and receive zero-pool randomizers only.

    Args:
        cache: Radix cache whose bit width covers the tensor's
        t: Fresh (fan_in == 1) quantized tensor
        rng: Caller-owned random source
        counter: Optional instrumentation, incremented in place
        workers: Number of worker processes; 1 encrypts in the calling process
        scalar_fast_path: Forwarded to cached_encrypt
        pool: Pool from encryption_pool(cache, workers) to reuse; without it
            a pool is started and stopped for this call

    Returns:
        TensorCipher with one ciphertext per element

    Raises:
        CapacityError: if the tensor's bit width exceeds the cache's
    """
    if t.quant.bit_width > cache.bit_width:
        raise CapacityError(
            f"Tensor bit width {t.quant.bit_width} exceeds cache bit width {cache.bit_width}"
        )
    if t.fan_in != 1:
        raise CapacityError("Only fresh tensors (fan_in == 1) can be encrypted")

    counter = counter if counter is not None else AdditionCounter()
    if workers > 1 and t.size > 1:
        ciphertexts = _encrypt_parallel(cache, t.values, rng, counter, workers, scalar_fast_path, pool)
    else:
        ciphertexts = [cached_encrypt(cache, value, rng, counter, scalar_fast_path) for value in t.values]

    return TensorCipher(
        shape=tuple(t.shape),
        ciphertexts=tuple(ciphertexts),
        quant=t.quant,
        cache_fingerprint=cache.fingerprint,
    )


def encrypt_tensor_direct(public_key: PublicKey, t: TensorPlain, rng: random.Random) -> TensorCipher:
    """Baseline: one primitive encryption per element."""
    scheme = get_scheme(public_key)
    ciphertexts = tuple(scheme.encrypt(public_key, value, rng) for value in t.values)
    return TensorCipher(
        shape=tuple(t.shape),
        ciphertexts=ciphertexts,
        quant=t.quant,
        cache_fingerprint=DIRECT_FINGERPRINT,
    )


def decrypt_tensor(sk: SecretKey, tc: TensorCipher) -> TensorPlain:
    """
    Decrypt element-wise, preserving shape and fan-in.

    Raises:
        TensorDecryptionError: naming the first element that fails
    """
    if len(tc.ciphertexts) != math.prod(tc.shape):
        raise ValueError(f"Shape {list(tc.shape)} does not match {len(tc.ciphertexts)} ciphertexts")

    scheme = get_scheme(sk)
    values = []
    for index, c in enumerate(tc.ciphertexts):
        try:
            values.append(scheme.decrypt(sk, c).value)
        except (MalformedCiphertextError, KeyContextError) as exc:
            raise TensorDecryptionError(index, exc) from exc

    return TensorPlain(shape=list(tc.shape), values=values, quant=tc.quant, fan_in=tc.fan_in)


def aggregate_tensors(public_key: PublicKey, tensors: Sequence[TensorCipher]) -> TensorCipher:
    """
    Homomorphic element-wise sum of cipher tensors.

    Raises:
        CapacityError: if the summed fan-in could wrap the plaintext modulus
        ValueError: for an empty input or mismatched shapes/quantization
    """
    if not tensors:
        raise ValueError("Nothing to aggregate")
    first = tensors[0]
    for other in tensors[1:]:
        if other.shape != first.shape or other.quant != first.quant:
            raise ValueError("All tensors must share shape and quantization")

    scheme = get_scheme(public_key)
    fan_in = sum(tc.fan_in for tc in tensors)
    if fan_in * (1 << first.quant.bit_width) >= scheme.plaintext_modulus(public_key):
        raise CapacityError(f"Aggregating {fan_in} tensors risks wrapping the plaintext modulus")

    summed = list(first.ciphertexts)
    for tc in tensors[1:]:
        summed = [scheme.add(public_key, acc, c) for acc, c in zip(summed, tc.ciphertexts)]

    fingerprints = {tc.cache_fingerprint for tc in tensors}
    return TensorCipher(
        shape=first.shape,
        ciphertexts=tuple(summed),
        quant=first.quant,
        cache_fingerprint=fingerprints.pop() if len(fingerprints) == 1 else "aggregate",
        fan_in=fan_in,
    )
