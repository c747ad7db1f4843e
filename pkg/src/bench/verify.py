"""
Invariant suites run by ``chem_bench.py verify``.

Each suite returns a list of InvariantCheck records; a failing check never
raises, so one run reports every broken invariant at once.
"""

from __future__ import annotations

import logging
import math
import random
from typing import Callable, Dict, Iterable, List, Optional, Sequence

import numpy as np

from src.core.parametrization import (
    cost_profile,
    cost_table,
    measured_cost,
    monotonicity_check,
    optimal_radix,
    predicted_cost,
)
from src.core.radix_cache import (
    RadixCache,
    addition_count,
    build_cache,
    cached_encrypt,
    draw_zero_mask,
    floor_log,
)
from src.errors import ChemError, ConfigurationError
from src.models.bench_models import InvariantCheck, VerifySummary
from src.models.cache_models import AdditionCounter
from src.schemes import DebugScheme, PaillierScheme, SchemeKeyPair, keypair_from_primes

logger = logging.getLogger(__name__)

ROUNDTRIP_BITS = 12
ROUNDTRIP_RADIXES = (2, 3, 10)
TOY_KEY_BITS = 64
TOY_BIT_WIDTH = 8
GRID_RADIXES = range(2, 17)
GRID_EXPONENTS = range(1, 6)
OPTIMAL_RADIX_MAXIMA = (3, 15, 255, 4095, 65535)
OPTIMAL_RADIX_RANGE = (2, 64)
IRREGULAR_MAXIMA = (10, 100, 1000, 5000)
DISTINCT_SAMPLES = 1000
DISTINCT_POOL = 128
MASK_DRAWS = 10_000
MASK_POOL = 64
MASK_FREQUENCY_BAND = (0.45, 0.55)
HOMOMORPHISM_PAIRS = 1000
IMMUTABILITY_ENCRYPTIONS = 10_000


def _check(suite: str, invariant: str, passed: bool, detail: str = "") -> InvariantCheck:
    check = InvariantCheck(suite=suite, invariant=invariant, passed=bool(passed), detail=detail)
    log = logger.info if check.passed else logger.warning
    log("[%s] %s: %s %s", suite, invariant, "pass" if check.passed else "FAIL", detail)
    return check


def _debug_keypair(rng: random.Random, key_bits: int = 64) -> SchemeKeyPair:
    return DebugScheme().keygen(key_bits, rng)


def _exhaustive_roundtrip(keypair: SchemeKeyPair, cache: RadixCache, rng: random.Random) -> List[int]:
    scheme = cache.scheme
    return [
        x
        for x in range(cache.max_plain + 1)
        if scheme.decrypt(keypair.secret_key, cached_encrypt(cache, x, rng)).value != x
    ]


def roundtrip_suite(rng: random.Random, key_bits: int) -> List[InvariantCheck]:
    """Exhaustive decrypt(cached_encrypt(x)) == x on small parameter sets."""
    checks = []
    keypair = _debug_keypair(rng)
    for radix in ROUNDTRIP_RADIXES:
        cache = build_cache(keypair.public_key, radix, ROUNDTRIP_BITS, 16, rng)
        bad = _exhaustive_roundtrip(keypair, cache, rng)
        checks.append(
            _check("roundtrip", f"debug r={radix} B={ROUNDTRIP_BITS}", not bad, f"{len(bad)} mismatches")
        )

    toy = PaillierScheme().keygen(TOY_KEY_BITS, rng)
    cache = build_cache(toy.public_key, 2, TOY_BIT_WIDTH, 8, rng)
    bad = _exhaustive_roundtrip(toy, cache, rng)
    checks.append(
        _check("roundtrip", f"paillier-{TOY_KEY_BITS} r=2 B={TOY_BIT_WIDTH}", not bad, f"{len(bad)} mismatches")
    )

    tiny = keypair_from_primes(5, 7)
    scheme = PaillierScheme()
    bad = [m for m in range(35) if scheme.decrypt(tiny.secret_key, scheme.encrypt(tiny.public_key, m, rng)).value != m]
    checks.append(_check("roundtrip", "paillier p=5 q=7 direct", not bad, f"{len(bad)} mismatches"))
    return checks


def oracle_suite(rng: random.Random, key_bits: int) -> List[InvariantCheck]:
    """
    Cached encryption against direct encryption over the full plaintext
    range, and counted digit-join additions against the digit-sum formula.
    """
    checks = []
    keypair = _debug_keypair(rng)
    scheme, secret_key = DebugScheme(), keypair.secret_key
    for radix in ROUNDTRIP_RADIXES:
        cache = build_cache(keypair.public_key, radix, ROUNDTRIP_BITS, 8, rng)
        wrong, differs = 0, 0
        for x in range(cache.max_plain + 1):
            counter = AdditionCounter()
            cached = scheme.decrypt(secret_key, cached_encrypt(cache, x, rng, counter)).value
            direct = scheme.decrypt(secret_key, scheme.encrypt(keypair.public_key, x, rng)).value
            if cached != direct:
                differs += 1
            if counter.digit_join != addition_count(x, radix, cache.top_index):
                wrong += 1
        checks.append(
            _check(
                "oracle",
                f"cached matches direct r={radix} B={ROUNDTRIP_BITS}",
                differs == 0,
                f"{differs} of {cache.max_plain + 1} differ",
            )
        )
        checks.append(_check("oracle", f"digit-join count r={radix}", wrong == 0, f"{wrong} miscounted"))

    for radix in range(2, 11):
        for m in IRREGULAR_MAXIMA:
            k = floor_log(m, radix)
            brute = max(addition_count(x, radix, k) for x in range(1, m + 1))
            got = measured_cost(radix, m)
            checks.append(
                _check("oracle", f"scan r={radix} m={m}", got == brute, f"scan={got} brute={brute}")
            )

    anchors = [
        ("predicted_cost(2, 15) == 3", math.isclose(predicted_cost(2, 15), 3.0)),
        ("measured_cost(2, 15) == 3", measured_cost(2, 15) == 3),
        ("measured_cost(2, 1) == 0", measured_cost(2, 1) == 0),
        ("measured_cost(3, 8) == 3", measured_cost(3, 8) == 3),
    ]
    checks.extend(_check("oracle", name, ok) for name, ok in anchors)
    return checks


def parametrization_suite(
    rng: random.Random,
    key_bits: int,
    radixes: Iterable[int] = GRID_RADIXES,
    exponents: Iterable[int] = GRID_EXPONENTS,
) -> List[InvariantCheck]:
    """Closed form against brute force, optimal radix and monotonicity."""
    checks = []
    table = cost_table(radixes, exponents)
    failed = table.loc[~table["matches"], ["radix", "k"]]
    checks.append(
        _check(
            "parametrization",
            "formula agrees with scan at m = r**(k+1) - 1",
            failed.empty,
            f"{len(table)} points, {len(failed)} disagree",
        )
    )

    for m in OPTIMAL_RADIX_MAXIMA:
        best = optimal_radix(m, OPTIMAL_RADIX_RANGE)
        checks.append(_check("parametrization", f"optimal radix m={m}", best == 2, f"got r={best}"))
        checks.append(
            _check("parametrization", f"monotone cost m={m}", monotonicity_check(m, OPTIMAL_RADIX_RANGE[1]))
        )

    bounded = [
        (radix, m)
        for radix in range(2, 11)
        for m in IRREGULAR_MAXIMA
        if not cost_profile(radix, m).matches
    ]
    checks.append(
        _check("parametrization", "scan <= ceil(formula) elsewhere", not bounded, f"violations: {bounded}")
    )
    return checks


def randomness_suite(rng: random.Random, key_bits: int) -> List[InvariantCheck]:
    """Repeated encryptions differ and every zero entry is used half the time."""
    keypair = PaillierScheme().keygen(key_bits, rng)
    cache = build_cache(keypair.public_key, 2, 8, DISTINCT_POOL, rng)
    outputs = {cached_encrypt(cache, 42, rng).to_bytes() for _ in range(DISTINCT_SAMPLES)}
    checks = [
        _check(
            "randomness",
            f"{DISTINCT_SAMPLES} encryptions of one value are distinct",
            len(outputs) == DISTINCT_SAMPLES,
            f"{len(outputs)} distinct",
        )
    ]

    debug = _debug_keypair(rng)
    mask_cache = build_cache(debug.public_key, 2, 8, MASK_POOL, rng)
    hits = np.zeros(MASK_POOL, dtype=np.int64)
    for _ in range(MASK_DRAWS):
        hits += np.fromiter(draw_zero_mask(mask_cache, rng).included, dtype=bool, count=MASK_POOL)
    freq = hits / MASK_DRAWS
    low, high = MASK_FREQUENCY_BAND
    checks.append(
        _check(
            "randomness",
            "zero entry inclusion frequency",
            bool(np.all((freq >= low) & (freq <= high))),
            f"min={freq.min():.4f} max={freq.max():.4f}",
        )
    )
    return checks


def homomorphism_suite(rng: random.Random, key_bits: int) -> List[InvariantCheck]:
    """dec(c(a) + c(b)) == a + b for cached ciphertexts."""
    scheme = PaillierScheme()
    keypair = scheme.keygen(key_bits, rng)
    cache = build_cache(keypair.public_key, 2, 16, 32, rng)
    pk, sk = keypair.public_key, keypair.secret_key

    wrong = 0
    for _ in range(HOMOMORPHISM_PAIRS):
        a, b = rng.randrange(cache.max_plain + 1), rng.randrange(cache.max_plain + 1)
        total = scheme.add(pk, cached_encrypt(cache, a, rng), cached_encrypt(cache, b, rng))
        if scheme.decrypt(sk, total).value != a + b:
            wrong += 1
    return [_check("homomorphism", f"{HOMOMORPHISM_PAIRS} sums at {key_bits} bits", wrong == 0, f"{wrong} wrong")]


def immutability_suite(rng: random.Random, key_bits: int) -> List[InvariantCheck]:
    """Encrypting never mutates the cache."""
    keypair = _debug_keypair(rng)
    cache = build_cache(keypair.public_key, 2, 16, 64, rng)
    before = cache.content_hash()
    for _ in range(IMMUTABILITY_ENCRYPTIONS):
        cached_encrypt(cache, rng.randrange(cache.max_plain + 1), rng)
    after = cache.content_hash()
    return [
        _check(
            "immutability",
            f"cache hash unchanged after {IMMUTABILITY_ENCRYPTIONS} encryptions",
            before == after,
            before[:16],
        )
    ]


SUITES: Dict[str, Callable[[random.Random, int], List[InvariantCheck]]] = {
    "roundtrip": roundtrip_suite,
    "oracle": oracle_suite,
    "parametrization": parametrization_suite,
    "randomness": randomness_suite,
    "homomorphism": homomorphism_suite,
    "immutability": immutability_suite,
}


def verify(
    suites: Sequence[str] = ("all",),
    key_bits: int = 1024,
    seed: Optional[int] = None,
) -> VerifySummary:
    """
    Run the named suites ("all" selects every suite).

    Raises:
        ConfigurationError: for an unknown suite name
    """
    names = list(SUITES) if "all" in suites else list(suites)
    unknown = [name for name in names if name not in SUITES]
    if unknown:
        raise ConfigurationError(f"Unknown suite(s) {unknown}; expected {sorted(SUITES)} or 'all'")

    rng = random.Random(seed) if seed is not None else random.SystemRandom()
    summary = VerifySummary(suites=names)
    for name in names:
        try:
            summary.checks.extend(SUITES[name](rng, key_bits))
        except ChemError as exc:
            summary.checks.append(_check(name, "suite completed", False, str(exc)))
    logger.info("Verification %s: %d checks, %d failed", summary.status, len(summary.checks), len(summary.failures))
    return summary
