"""
Paillier cryptosystem with generator ``g = n + 1``.

All large-integer arithmetic goes through gmpy2; values are kept as
``gmpy2.mpz`` internally and converted to ``int`` only at serialization.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass
from typing import Any, Dict

import gmpy2

from src.errors import KeyGenerationError, MalformedCiphertextError, SerializationError
from src.schemes.base import (
    AdditiveScheme,
    Ciphertext,
    PlainInt,
    PlainLike,
    PublicKey,
    SchemeKeyPair,
    SecretKey,
    int_to_bytes,
)

logger = logging.getLogger(__name__)

MIN_KEY_BITS = 16
MAX_KEYGEN_ATTEMPTS = 64


@dataclass(frozen=True)
class PaillierPublicKey(PublicKey):
    """Modulus ``n = p*q``; ``generator`` is always ``n + 1``."""

    generator: int
    n_square: int

    @classmethod
    def from_modulus(cls, n: int) -> "PaillierPublicKey":
        n = gmpy2.mpz(n)
        return cls(scheme_id=PaillierScheme.scheme_id, modulus=n, generator=n + 1, n_square=n * n)


@dataclass(frozen=True)
class PaillierSecretKey(SecretKey):
    p: int
    q: int
    lam: int
    mu: int


@dataclass(frozen=True)
class PaillierCiphertext(Ciphertext):
    value: int

    def to_bytes(self) -> bytes:
        return int_to_bytes(self.value)


def keypair_from_primes(p: int, q: int) -> SchemeKeyPair:
    """
    Build a key pair from caller-chosen primes (toy keys for tests).

    Args:
        p: First prime
        q: Second prime, distinct from p

    Returns:
        SchemeKeyPair with lambda = lcm(p-1, q-1) and mu = lambda^-1 mod n

    Raises:
        KeyGenerationError: if p, q are not distinct odd primes or
            gcd(p*q, (p-1)(q-1)) != 1
    """
    p, q = gmpy2.mpz(p), gmpy2.mpz(q)
    if p == q:
        raise KeyGenerationError("p and q must be distinct")
    for prime in (p, q):
        if prime < 3 or not gmpy2.is_prime(prime):
            raise KeyGenerationError(f"{int(prime)} is not an odd prime")
    n = p * q
    if gmpy2.gcd(n, (p - 1) * (q - 1)) != 1:
        raise KeyGenerationError("gcd(p*q, (p-1)(q-1)) must be 1")

    lam = gmpy2.lcm(p - 1, q - 1)
    try:
        mu = gmpy2.invert(lam, n)
    except ZeroDivisionError as exc:
        raise KeyGenerationError("lambda is not invertible modulo n") from exc

    public_key = PaillierPublicKey.from_modulus(n)
    secret_key = PaillierSecretKey(
        scheme_id=PaillierScheme.scheme_id,
        public_key=public_key,
        p=p,
        q=q,
        lam=lam,
        mu=mu,
    )
    return SchemeKeyPair(public_key=public_key, secret_key=secret_key, key_bits=int(n.bit_length()))


def _random_prime(bits: int, rng: random.Random) -> gmpy2.mpz:
    # Top two bits set so the product of two such primes has exactly bits_p + bits_q bits.
    candidate = rng.getrandbits(bits) | (3 << (bits - 2)) | 1
    return gmpy2.next_prime(gmpy2.mpz(candidate))


class PaillierScheme(AdditiveScheme):
    """Production additive scheme."""

    scheme_id = "paillier"
    secure = True

    def keygen(self, key_bits: int, rng: random.Random) -> SchemeKeyPair:
        if key_bits < MIN_KEY_BITS:
            raise KeyGenerationError(f"key_bits must be >= {MIN_KEY_BITS}, got {key_bits}")

        half = key_bits // 2
        for attempt in range(1, MAX_KEYGEN_ATTEMPTS + 1):
            p = _random_prime(half, rng)
            q = _random_prime(key_bits - half, rng)
            if p == q or p.bit_length() != half or q.bit_length() != key_bits - half:
                continue
            n = p * q
            if n.bit_length() != key_bits or gmpy2.gcd(n, (p - 1) * (q - 1)) != 1:
                continue
            logger.debug("Generated %d-bit Paillier key after %d attempt(s)", key_bits, attempt)
            return keypair_from_primes(p, q)

        raise KeyGenerationError(
            f"Could not generate a {key_bits}-bit key in {MAX_KEYGEN_ATTEMPTS} attempts"
        )

    @staticmethod
    def _random_unit(n: gmpy2.mpz, rng: random.Random) -> gmpy2.mpz:
        while True:
            rho = gmpy2.mpz(rng.randrange(1, int(n)))
            if gmpy2.gcd(rho, n) == 1:
                return rho

    def encrypt(self, pk: PublicKey, m: PlainLike, rng: random.Random) -> PaillierCiphertext:
        value = self._plain_value(pk, m)
        n, n_square = pk.modulus, pk.n_square
        # (1 + n)^m = 1 + m*n (mod n^2)
        nude = (1 + value * n) % n_square
        rho = self._random_unit(n, rng)
        c = nude * gmpy2.powmod(rho, n, n_square) % n_square
        return PaillierCiphertext(context=pk.fingerprint, value=c)

    def decrypt(self, sk: SecretKey, c: Ciphertext) -> PlainInt:
        self._check_type(c, PaillierCiphertext)
        pk = sk.public_key
        self._check_context(pk, c)
        n, n_square = pk.modulus, pk.n_square
        if not 0 <= c.value < n_square:
            raise MalformedCiphertextError("Ciphertext must be in the range [0, n^2)")

        u = gmpy2.powmod(c.value, sk.lam, n_square)
        plain = (u - 1) // n * sk.mu % n
        return PlainInt(value=int(plain), modulus=int(n))

    def add(self, pk: PublicKey, c1: Ciphertext, c2: Ciphertext) -> PaillierCiphertext:
        self._check_type(c1, PaillierCiphertext)
        self._check_type(c2, PaillierCiphertext)
        self._check_context(pk, c1, c2)
        return PaillierCiphertext(context=pk.fingerprint, value=c1.value * c2.value % pk.n_square)

    def scalar_mul(self, pk: PublicKey, c: Ciphertext, k: int) -> PaillierCiphertext:
        self._check_type(c, PaillierCiphertext)
        self._check_context(pk, c)
        if k < 0:
            raise ValueError(f"Scalar must be non-negative, got {k}")
        return PaillierCiphertext(context=pk.fingerprint, value=gmpy2.powmod(c.value, k, pk.n_square))

    def public_key_to_dict(self, pk: PublicKey) -> Dict[str, Any]:
        return {"modulus": str(int(pk.modulus))}

    def public_key_from_dict(self, data: Dict[str, Any]) -> PaillierPublicKey:
        return PaillierPublicKey.from_modulus(int(data["modulus"]))

    def secret_key_to_dict(self, sk: SecretKey) -> Dict[str, Any]:
        return {"p": str(int(sk.p)), "q": str(int(sk.q))}

    def secret_key_from_dict(self, pk: PublicKey, data: Dict[str, Any]) -> PaillierSecretKey:
        keypair = keypair_from_primes(int(data["p"]), int(data["q"]))
        if keypair.public_key.modulus != pk.modulus:
            raise SerializationError("Secret primes do not match the public modulus")
        return keypair.secret_key

    def ciphertext_to_dict(self, c: Ciphertext) -> Dict[str, Any]:
        return {"value": str(int(c.value))}

    def ciphertext_from_dict(self, pk: PublicKey, data: Dict[str, Any]) -> PaillierCiphertext:
        return PaillierCiphertext(context=pk.fingerprint, value=gmpy2.mpz(int(data["value"])))
