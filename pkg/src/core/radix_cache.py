"""
Cached homomorphic encryption over a pool of radix powers and zeros.

A plaintext x is written in radix r as sum(d_k * r**k). Its ciphertext is
assembled by adding the cached encryption of r**k to itself d_k times and
then adding a random subset of cached encryptions of zero, so the primitive
encryptor is only ever called while the cache is built.
"""

from __future__ import annotations

import hashlib
import logging
import numbers
import random
from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Tuple

from src.errors import CapacityError, PlaintextRangeError
from src.models.cache_models import AdditionCounter, RadixDigits, ZeroMask
from src.schemes import AdditiveScheme, Ciphertext, PublicKey, get_scheme

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RadixCache:
    """
    Immutable pool of ``he(r**i)`` for ``0 <= i <= floor(log_r m)`` and
    ``zero_pool_size`` independent ``he(0)``, with ``m = 2**bit_width - 1``.
    """

    public_key: PublicKey
    radix: int
    bit_width: int
    radix_ctxts: Tuple[Ciphertext, ...]
    zero_ctxts: Tuple[Ciphertext, ...]
    min_zero_inclusions: int = 1
    fan_in: int = 1

    @property
    def max_plain(self) -> int:
        return (1 << self.bit_width) - 1

    @property
    def zero_pool_size(self) -> int:
        return len(self.zero_ctxts)

    @property
    def top_index(self) -> int:
        return len(self.radix_ctxts) - 1

    @property
    def scheme(self) -> AdditiveScheme:
        return get_scheme(self.public_key)

    @property
    def entry_count(self) -> int:
        return len(self.radix_ctxts) + len(self.zero_ctxts)

    def content_hash(self) -> str:
        """SHA-256 over the parameters and every cached ciphertext."""
        digest = hashlib.sha256()
        digest.update(f"{self.public_key.fingerprint}:{self.radix}:{self.bit_width}".encode("ascii"))
        for c in self.radix_ctxts + self.zero_ctxts:
            digest.update(c.to_bytes())
        return digest.hexdigest()

    @cached_property
    def fingerprint(self) -> str:
        return self.content_hash()[:16]


def _is_integer(x: object) -> bool:
    return isinstance(x, numbers.Integral) and not isinstance(x, bool)


def floor_log(m: int, radix: int) -> int:
    """floor(log_r m) for m >= 1, in exact integer arithmetic."""
    k, power = 0, radix
    while power <= m:
        power *= radix
        k += 1
    return k


def cache_top_index(radix: int, bit_width: int) -> int:
    """Highest radix exponent needed for plaintexts below 2**bit_width."""
    return floor_log((1 << bit_width) - 1, radix)


def build_cache(
    public_key: PublicKey,
    radix: int,
    bit_width: int,
    zero_pool_size: int,
    rng: random.Random,
    min_zero_inclusions: int = 1,
    fan_in: int = 1,
) -> RadixCache:
    """
    Encrypt the radix powers and the zero pool.

    Args:
        public_key: Key every cache entry is encrypted under
        radix: Radix r >= 2
        bit_width: Message bit width B; plaintexts lie in [0, 2**B)
        zero_pool_size: Number n_z of cached zero ciphertexts
        rng: Caller-owned random source
        min_zero_inclusions: Floor on zero entries added per ciphertext
        fan_in: Largest number of ciphertexts that will be summed later

    Returns:
        RadixCache with floor(log_r(2**B - 1)) + 1 radix entries

    Raises:
        CapacityError: if a radix power, or 2**B * fan_in, reaches the
            scheme's plaintext modulus
    """
    if radix < 2:
        raise ValueError(f"radix must be >= 2, got {radix}")
    if bit_width < 1:
        raise ValueError(f"bit_width must be >= 1, got {bit_width}")
    if zero_pool_size < 1:
        raise ValueError(f"zero_pool_size must be >= 1, got {zero_pool_size}")
    if not 0 <= min_zero_inclusions <= zero_pool_size:
        raise ValueError("min_zero_inclusions must lie in [0, zero_pool_size]")
    if fan_in < 1:
        raise ValueError(f"fan_in must be >= 1, got {fan_in}")

    scheme = get_scheme(public_key)
    modulus = scheme.plaintext_modulus(public_key)
    k = cache_top_index(radix, bit_width)
    if radix ** k >= modulus:
        raise CapacityError(f"Radix power {radix}**{k} exceeds the plaintext modulus")
    if (1 << bit_width) * fan_in >= modulus:
        raise CapacityError(
            f"2**{bit_width} * fan-in {fan_in} does not fit below the plaintext modulus "
            f"({modulus.bit_length()} bits)"
        )

    radix_ctxts = tuple(scheme.encrypt(public_key, radix ** i, rng) for i in range(k + 1))
    zero_ctxts = tuple(scheme.encrypt(public_key, 0, rng) for _ in range(zero_pool_size))

    logger.debug(
        "Built %s cache: r=%d B=%d radix entries=%d zero entries=%d",
        scheme.scheme_id,
        radix,
        bit_width,
        len(radix_ctxts),
        len(zero_ctxts),
    )
    return RadixCache(
        public_key=public_key,
        radix=radix,
        bit_width=bit_width,
        radix_ctxts=radix_ctxts,
        zero_ctxts=zero_ctxts,
        min_zero_inclusions=min_zero_inclusions,
        fan_in=fan_in,
    )


def digits(x: int, radix: int, k: int) -> RadixDigits:
    """
    Radix-r digits of x at positions 0..k, least significant first.

    Raises:
        PlaintextRangeError: if x is outside [0, r**(k+1) - 1]
    """
    if radix < 2:
        raise ValueError(f"radix must be >= 2, got {radix}")
    if not _is_integer(x) or not 0 <= x < radix ** (k + 1):
        raise PlaintextRangeError(f"{x!r} is not representable with {k + 1} radix-{radix} digits")
    x = int(x)

    out = []
    for _ in range(k + 1):
        x, digit = divmod(x, radix)
        out.append(digit)
    return RadixDigits(digits=tuple(out), radix=radix)


def addition_count(x: int, radix: int, k: int) -> int:
    """Pairwise additions needed to join the repeated radix terms of x."""
    return max(digits(x, radix, k).digit_sum() - 1, 0)


def draw_zero_mask(cache: RadixCache, rng: random.Random) -> ZeroMask:
    """Include each zero entry with probability 1/2, topped up to the floor."""
    size = cache.zero_pool_size
    bits = rng.getrandbits(size)
    included = [bool((bits >> i) & 1) for i in range(size)]
    rnd = sum(included)

    shortfall = cache.min_zero_inclusions - rnd
    if shortfall > 0:
        excluded = [i for i, flag in enumerate(included) if not flag]
        for i in rng.sample(excluded, shortfall):
            included[i] = True
        rnd += shortfall

    return ZeroMask(included=tuple(included), rnd=rnd)


def cached_encrypt(
    cache: RadixCache,
    x: int,
    rng: random.Random,
    counter: Optional[AdditionCounter] = None,
    scalar_fast_path: bool = False,
) -> Ciphertext:
    """
    Encrypt x using only homomorphic additions over cache entries.

    Args:
        cache: Radix cache built under the target public key
        x: Plaintext in [0, cache.max_plain]
        rng: Caller-owned random source for the zero mask
        counter: Optional instrumentation, incremented in place
        scalar_fast_path: Replace repeated additions of one radix entry by a
            single scalar multiplication

    Returns:
        Ciphertext decrypting to x

    Raises:
        PlaintextRangeError: if x is outside [0, cache.max_plain]
    """
    if not _is_integer(x) or not 0 <= x <= cache.max_plain:
        raise PlaintextRangeError(f"{x!r} outside [0, {cache.max_plain}]")
    x = int(x)

    scheme = cache.scheme
    pk = cache.public_key
    acc: Optional[Ciphertext] = None
    joins = 0

    if x:
        for k, digit in enumerate(digits(x, cache.radix, cache.top_index).digits):
            if digit == 0:
                continue
            term = cache.radix_ctxts[k]
            repeats = digit
            if scalar_fast_path and digit > 1:
                term = scheme.scalar_mul(pk, term, digit)
                repeats = 1
            for _ in range(repeats):
                if acc is None:
                    acc = term
                else:
                    acc = scheme.add(pk, acc, term)
                    joins += 1

    randomizers = 0
    for j in draw_zero_mask(cache, rng).indices():
        if acc is None:
            acc = cache.zero_ctxts[j]
        else:
            acc = scheme.add(pk, acc, cache.zero_ctxts[j])
            randomizers += 1

    if acc is None:
        # Only reachable for x == 0 with min_zero_inclusions == 0.
        acc = cache.zero_ctxts[0]

    if counter is not None:
        counter.digit_join += joins
        counter.randomizer += randomizers
    return acc
