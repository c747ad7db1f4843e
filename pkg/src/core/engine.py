"""Facade tying a scheme, a key pair and a radix cache together."""

from __future__ import annotations

import logging
import random
from pathlib import Path
from typing import TYPE_CHECKING, Optional, Sequence, Union

import numpy as np
from numpy.typing import ArrayLike

from src.core.radix_cache import RadixCache, build_cache
from src.core.tensor_codec import (
    aggregate_tensors,
    decrypt_tensor,
    dequantize,
    encrypt_tensor,
    encrypt_tensor_direct,
    quantize,
)
from src.errors import KeyContextError
from src.models.bench_models import CacheParams
from src.models.cache_models import AdditionCounter
from src.models.tensor_models import QuantParams, TensorCipher, TensorPlain
from src.schemes import AdditiveScheme, PublicKey, SchemeKeyPair, get_scheme

if TYPE_CHECKING:
    from src.storage.artifact_store import ArtifactStore

logger = logging.getLogger(__name__)


class ChemEngine:
    """
    Holds the state a client needs to encrypt tensors through a cache.

    The engine owns one random source. Pass a seeded ``random.Random`` for
    reproducible runs; the default is ``random.SystemRandom``.
    """

    def __init__(
        self,
        scheme: Union[str, AdditiveScheme] = "paillier",
        rng: Optional[random.Random] = None,
        store: Optional[ArtifactStore] = None,
    ):
        """
        Args:
            scheme: Scheme id or instance
            rng: Random source for keys, cache entries and zero masks
            store: Artifact store used by the save/load helpers
        """
        # storage imports src.core, so the store module is loaded on first use
        from src.storage.artifact_store import ArtifactStore

        self.scheme = get_scheme(scheme) if isinstance(scheme, str) else scheme
        self.rng = rng if rng is not None else random.SystemRandom()
        self.store = store if store is not None else ArtifactStore()
        self.keypair: Optional[SchemeKeyPair] = None
        self.cache: Optional[RadixCache] = None
        self.counter = AdditionCounter()

    @property
    def public_key(self) -> PublicKey:
        if self.keypair is None:
            raise KeyContextError("No key pair loaded; call generate_keys or load_keys first")
        return self.keypair.public_key

    def _require_cache(self) -> RadixCache:
        if self.cache is None:
            raise KeyContextError("No cache loaded; call build_cache or load_cache first")
        return self.cache

    def generate_keys(self, key_bits: int) -> SchemeKeyPair:
        self.keypair = self.scheme.keygen(key_bits, self.rng)
        self.cache = None
        logger.info(
            "Generated %s key pair (%d bits, fingerprint %s)",
            self.scheme.scheme_id,
            key_bits,
            self.keypair.public_key.fingerprint,
        )
        return self.keypair

    def use_keys(self, keypair: SchemeKeyPair) -> None:
        self.scheme = get_scheme(keypair)
        self.keypair = keypair
        if self.cache is not None and self.cache.public_key != keypair.public_key:
            self.cache = None

    def build_cache(self, params: CacheParams, fan_in: int = 1) -> RadixCache:
        """Encrypt the radix and zero pools under the loaded public key."""
        self.cache = build_cache(
            self.public_key,
            radix=params.radix,
            bit_width=params.bit_width,
            zero_pool_size=params.zero_pool_size,
            rng=self.rng,
            min_zero_inclusions=params.min_zero_inclusions,
            fan_in=fan_in,
        )
        logger.info("Built cache %s with %d entries", self.cache.fingerprint, self.cache.entry_count)
        return self.cache

    def encrypt(self, t: TensorPlain, workers: int = 1, scalar_fast_path: bool = False) -> TensorCipher:
        return encrypt_tensor(
            self._require_cache(),
            t,
            self.rng,
            counter=self.counter,
            workers=workers,
            scalar_fast_path=scalar_fast_path,
        )

    def encrypt_direct(self, t: TensorPlain) -> TensorCipher:
        return encrypt_tensor_direct(self.public_key, t, self.rng)

    def decrypt(self, tc: TensorCipher) -> TensorPlain:
        if self.keypair is None:
            raise KeyContextError("No secret key loaded")
        return decrypt_tensor(self.keypair.secret_key, tc)

    def aggregate(self, tensors: Sequence[TensorCipher]) -> TensorCipher:
        return aggregate_tensors(self.public_key, tensors)

    def encrypt_array(self, values: ArrayLike, quant: QuantParams, workers: int = 1) -> TensorCipher:
        """Quantize a real-valued array and encrypt it through the cache."""
        return self.encrypt(quantize(values, quant), workers=workers)

    def decrypt_array(self, tc: TensorCipher) -> np.ndarray:
        return dequantize(self.decrypt(tc))

    def save_keys(self, path: Union[str, Path]) -> Path:
        if self.keypair is None:
            raise KeyContextError("No key pair to save")
        return self.store.write_keypair(path, self.keypair)

    def load_keys(self, path: Union[str, Path]) -> SchemeKeyPair:
        self.use_keys(self.store.read_keypair(path))
        return self.keypair

    def save_cache(self, path: Union[str, Path]) -> Path:
        return self.store.write_cache(path, self._require_cache())

    def load_cache(self, path: Union[str, Path]) -> RadixCache:
        """
        Load a cache file, checking it belongs to the loaded key pair.

        Raises:
            KeyContextError: if the cache was built under another public key
        """
        cache = self.store.read_cache(path)
        if self.keypair is not None and cache.public_key != self.keypair.public_key:
            raise KeyContextError(
                f"Cache {cache.fingerprint} was built under key {cache.public_key.fingerprint}, "
                f"not {self.keypair.public_key.fingerprint}"
            )
        self.scheme = cache.scheme
        self.cache = cache
        return cache
