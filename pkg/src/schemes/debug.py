"""
Transparent debug scheme. NOT SECURE.

A ciphertext is the plaintext accumulator together with a random nonce
accumulator; addition is component-wise. It honours the same interface and
algebra as Paillier so the cache layer can be tested exhaustively at a tiny
fraction of the cost.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Any, Dict

from src.errors import KeyGenerationError, MalformedCiphertextError
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

NONCE_BITS = 64


@dataclass(frozen=True)
class DebugPublicKey(PublicKey):
    """Plaintext modulus ``2**key_bits``; ``key_id`` separates independent keys."""

    key_id: int

    def _identity(self) -> str:
        return f"{self.scheme_id}:{int(self.modulus)}:{self.key_id}"

    @property
    def key_bits(self) -> int:
        return int(self.modulus).bit_length() - 1


@dataclass(frozen=True)
class DebugSecretKey(SecretKey):
    pass


@dataclass(frozen=True)
class DebugCiphertext(Ciphertext):
    plain: int
    nonce: int

    def to_bytes(self) -> bytes:
        return int_to_bytes(self.plain) + int_to_bytes(self.nonce)


class DebugScheme(AdditiveScheme):
    scheme_id = "debug"
    secure = False

    def keygen(self, key_bits: int, rng: random.Random) -> SchemeKeyPair:
        if key_bits < 2:
            raise KeyGenerationError(f"key_bits must be >= 2, got {key_bits}")
        public_key = DebugPublicKey(scheme_id=self.scheme_id, modulus=1 << key_bits, key_id=rng.getrandbits(32))
        secret_key = DebugSecretKey(scheme_id=self.scheme_id, public_key=public_key)
        return SchemeKeyPair(public_key=public_key, secret_key=secret_key, key_bits=key_bits)

    def encrypt(self, pk: PublicKey, m: PlainLike, rng: random.Random) -> DebugCiphertext:
        value = self._plain_value(pk, m)
        return DebugCiphertext(context=pk.fingerprint, plain=value, nonce=rng.getrandbits(NONCE_BITS))

    def decrypt(self, sk: SecretKey, c: Ciphertext) -> PlainInt:
        self._check_type(c, DebugCiphertext)
        pk = sk.public_key
        self._check_context(pk, c)
        if not 0 <= c.plain < pk.modulus or c.nonce < 0:
            raise MalformedCiphertextError("Debug ciphertext components out of range")
        return PlainInt(value=c.plain, modulus=int(pk.modulus))

    def add(self, pk: PublicKey, c1: Ciphertext, c2: Ciphertext) -> DebugCiphertext:
        self._check_type(c1, DebugCiphertext)
        self._check_type(c2, DebugCiphertext)
        self._check_context(pk, c1, c2)
        return DebugCiphertext(
            context=pk.fingerprint,
            plain=(c1.plain + c2.plain) % pk.modulus,
            nonce=c1.nonce + c2.nonce,
        )

    def scalar_mul(self, pk: PublicKey, c: Ciphertext, k: int) -> DebugCiphertext:
        self._check_type(c, DebugCiphertext)
        self._check_context(pk, c)
        if k < 0:
            raise ValueError(f"Scalar must be non-negative, got {k}")
        return DebugCiphertext(context=pk.fingerprint, plain=c.plain * k % pk.modulus, nonce=c.nonce * k)

    def public_key_to_dict(self, pk: PublicKey) -> Dict[str, Any]:
        return {"modulus": str(int(pk.modulus)), "key_id": pk.key_id}

    def public_key_from_dict(self, data: Dict[str, Any]) -> DebugPublicKey:
        return DebugPublicKey(scheme_id=self.scheme_id, modulus=int(data["modulus"]), key_id=int(data["key_id"]))

    def secret_key_to_dict(self, sk: SecretKey) -> Dict[str, Any]:
        return {}

    def secret_key_from_dict(self, pk: PublicKey, data: Dict[str, Any]) -> DebugSecretKey:
        return DebugSecretKey(scheme_id=self.scheme_id, public_key=pk)

    def ciphertext_to_dict(self, c: Ciphertext) -> Dict[str, Any]:
        return {"plain": str(c.plain), "nonce": str(c.nonce)}

    def ciphertext_from_dict(self, pk: PublicKey, data: Dict[str, Any]) -> DebugCiphertext:
        return DebugCiphertext(context=pk.fingerprint, plain=int(data["plain"]), nonce=int(data["nonce"]))
