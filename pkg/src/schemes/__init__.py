"""Additively homomorphic encryption schemes."""

from typing import Dict, Union

from src.errors import ConfigurationError
from src.schemes.base import (
    AdditiveScheme,
    Ciphertext,
    PlainInt,
    PublicKey,
    SchemeKeyPair,
    SecretKey,
)
from src.schemes.debug import DebugCiphertext, DebugScheme
from src.schemes.paillier import PaillierCiphertext, PaillierScheme, keypair_from_primes

SCHEMES: Dict[str, AdditiveScheme] = {
    PaillierScheme.scheme_id: PaillierScheme(),
    DebugScheme.scheme_id: DebugScheme(),
}


def get_scheme(key_or_id: Union[str, PublicKey, SecretKey, SchemeKeyPair]) -> AdditiveScheme:
    """Resolve the scheme for an id, a key or a key pair."""
    scheme_id = key_or_id if isinstance(key_or_id, str) else key_or_id.scheme_id
    try:
        return SCHEMES[scheme_id]
    except KeyError as exc:
        raise ConfigurationError(
            f"Unknown scheme {scheme_id!r}; expected one of {sorted(SCHEMES)}"
        ) from exc


__all__ = [
    "AdditiveScheme",
    "Ciphertext",
    "DebugCiphertext",
    "DebugScheme",
    "PaillierCiphertext",
    "PaillierScheme",
    "PlainInt",
    "PublicKey",
    "SCHEMES",
    "SchemeKeyPair",
    "SecretKey",
    "get_scheme",
    "keypair_from_primes",
]
