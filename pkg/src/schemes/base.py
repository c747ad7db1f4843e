"""Interface contract for additively homomorphic encryption schemes."""

from __future__ import annotations

import hashlib
import numbers
import random
from abc import ABC, abstractmethod
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Dict, Union

from src.errors import KeyContextError, MalformedCiphertextError, PlaintextRangeError


@dataclass(frozen=True)
class PublicKey:
    """Public half of a key pair; ``modulus`` is the plaintext modulus M."""

    scheme_id: str
    modulus: int

    def _identity(self) -> str:
        return f"{self.scheme_id}:{int(self.modulus)}"

    @cached_property
    def fingerprint(self) -> str:
        """Short stable identifier used as the key context of ciphertexts."""
        return hashlib.sha256(self._identity().encode("ascii")).hexdigest()[:16]

    @property
    def key_bits(self) -> int:
        return int(self.modulus).bit_length()


@dataclass(frozen=True)
class SecretKey:
    """Secret half of a key pair."""

    scheme_id: str
    public_key: PublicKey


@dataclass(frozen=True)
class SchemeKeyPair:
    """Key pair produced by :meth:`AdditiveScheme.keygen`."""

    public_key: PublicKey
    secret_key: SecretKey
    key_bits: int

    @property
    def scheme_id(self) -> str:
        return self.public_key.scheme_id


@dataclass(frozen=True)
class Ciphertext:
    """Opaque encrypted value bound to the public key it was produced under."""

    context: str

    def to_bytes(self) -> bytes:
        raise NotImplementedError


@dataclass(frozen=True)
class PlainInt:
    """Plaintext integer in ``[0, modulus)``."""

    value: int
    modulus: int

    def __post_init__(self) -> None:
        if not 0 <= self.value < self.modulus:
            raise PlaintextRangeError(
                f"Plaintext {self.value} outside [0, {self.modulus})"
            )

    def __int__(self) -> int:
        return int(self.value)


PlainLike = Union[int, PlainInt]


def int_to_bytes(value: int) -> bytes:
    """Length-prefixed big-endian encoding of a non-negative integer."""
    value = int(value)
    body = value.to_bytes(max(1, (value.bit_length() + 7) // 8), "big")
    return len(body).to_bytes(4, "big") + body


class AdditiveScheme(ABC):
    """
    Additively homomorphic, probabilistic public-key encryption.

    Implementations are stateless: every operation receives its keys and,
    where randomness is needed, a caller-owned ``random.Random`` source.
    Pass ``random.SystemRandom()`` outside of tests and benchmarks.
    """

    scheme_id: str = ""
    secure: bool = True

    @abstractmethod
    def keygen(self, key_bits: int, rng: random.Random) -> SchemeKeyPair:
        """Generate a key pair of approximately ``key_bits`` bits."""

    @abstractmethod
    def encrypt(self, pk: PublicKey, m: PlainLike, rng: random.Random) -> Ciphertext:
        """Encrypt ``m`` in ``[0, M)`` with fresh randomness."""

    @abstractmethod
    def decrypt(self, sk: SecretKey, c: Ciphertext) -> PlainInt:
        """Recover the plaintext of ``c``."""

    @abstractmethod
    def add(self, pk: PublicKey, c1: Ciphertext, c2: Ciphertext) -> Ciphertext:
        """Homomorphic addition: decrypts to ``(m1 + m2) mod M``."""

    @abstractmethod
    def scalar_mul(self, pk: PublicKey, c: Ciphertext, k: int) -> Ciphertext:
        """Multiply the plaintext of ``c`` by the public integer ``k``."""

    @abstractmethod
    def public_key_to_dict(self, pk: PublicKey) -> Dict[str, Any]:
        ...

    @abstractmethod
    def public_key_from_dict(self, data: Dict[str, Any]) -> PublicKey:
        ...

    @abstractmethod
    def secret_key_to_dict(self, sk: SecretKey) -> Dict[str, Any]:
        ...

    @abstractmethod
    def secret_key_from_dict(self, pk: PublicKey, data: Dict[str, Any]) -> SecretKey:
        ...

    @abstractmethod
    def ciphertext_to_dict(self, c: Ciphertext) -> Dict[str, Any]:
        ...

    @abstractmethod
    def ciphertext_from_dict(self, pk: PublicKey, data: Dict[str, Any]) -> Ciphertext:
        ...

    def plaintext_modulus(self, pk: PublicKey) -> int:
        return int(pk.modulus)

    @staticmethod
    def _plain_value(pk: PublicKey, m: PlainLike) -> int:
        value = m.value if isinstance(m, PlainInt) else m
        if isinstance(value, bool) or not isinstance(value, numbers.Integral):
            raise PlaintextRangeError(f"Plaintext {m!r} is not an integer")
        value = int(value)
        if not 0 <= value < pk.modulus:
            raise PlaintextRangeError(f"Plaintext {value} outside [0, {int(pk.modulus)})")
        return value

    @staticmethod
    def _check_context(pk: PublicKey, *ciphertexts: Ciphertext) -> None:
        for c in ciphertexts:
            if c.context != pk.fingerprint:
                raise KeyContextError(
                    f"Ciphertext context {c.context} does not match key {pk.fingerprint}"
                )

    def _check_type(self, c: Ciphertext, expected: type) -> None:
        if not isinstance(c, expected):
            raise MalformedCiphertextError(
                f"{self.scheme_id} scheme cannot handle {type(c).__name__}"
            )
