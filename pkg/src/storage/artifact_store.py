"""File persistence for keys, caches, tensors and reports.

Every container is a single JSON document with a ``format`` tag. Big
integers are written as decimal strings so any JSON reader can load them
without precision loss.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional, Sequence, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, ValidationError

from src.core.radix_cache import RadixCache
from src.core.tensor_codec import quantize
from src.errors import SerializationError
from src.models.bench_models import BenchReport
from src.models.tensor_models import QuantParams, TensorCipher, TensorPlain
from src.schemes import PublicKey, SchemeKeyPair, get_scheme

logger = logging.getLogger(__name__)

KEYPAIR_FORMAT = "chem-keypair/1"
CACHE_FORMAT = "chem-cache/1"
TENSOR_PLAIN_FORMAT = "chem-tensor-plain/1"
TENSOR_CIPHER_FORMAT = "chem-tensor-cipher/1"

PathLike = Union[str, Path]


class ArtifactStore:
    """Reads and writes JSON containers under a root directory."""

    def __init__(self, root: PathLike = "."):
        self.root = Path(root)

    def _resolve(self, path: PathLike) -> Path:
        path = Path(path)
        return path if path.is_absolute() else self.root / path

    def write_json(self, path: PathLike, payload: Dict[str, Any]) -> Path:
        target = self._resolve(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(json.dumps(payload, indent=2), encoding="utf-8")
        return target

    def read_json(self, path: PathLike, expected_format: Optional[str] = None) -> Dict[str, Any]:
        source = self._resolve(path)
        try:
            payload = json.loads(source.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise SerializationError(f"Cannot read {source}: {exc}") from exc
        if expected_format and payload.get("format") != expected_format:
            raise SerializationError(
                f"{source} has format {payload.get('format')!r}, expected {expected_format!r}"
            )
        return payload

    # Keys

    @staticmethod
    def keypair_to_dict(keypair: SchemeKeyPair) -> Dict[str, Any]:
        scheme = get_scheme(keypair)
        return {
            "format": KEYPAIR_FORMAT,
            "scheme": scheme.scheme_id,
            "key_bits": keypair.key_bits,
            "public": scheme.public_key_to_dict(keypair.public_key),
            "secret": scheme.secret_key_to_dict(keypair.secret_key),
        }

    @staticmethod
    def keypair_from_dict(payload: Dict[str, Any]) -> SchemeKeyPair:
        try:
            scheme = get_scheme(payload["scheme"])
            public_key = scheme.public_key_from_dict(payload["public"])
            secret_key = scheme.secret_key_from_dict(public_key, payload["secret"])
            return SchemeKeyPair(public_key=public_key, secret_key=secret_key, key_bits=int(payload["key_bits"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise SerializationError(f"Malformed key pair container: {exc}") from exc

    def write_keypair(self, path: PathLike, keypair: SchemeKeyPair) -> Path:
        return self.write_json(path, self.keypair_to_dict(keypair))

    def read_keypair(self, path: PathLike) -> SchemeKeyPair:
        return self.keypair_from_dict(self.read_json(path, KEYPAIR_FORMAT))

    # Caches

    @staticmethod
    def cache_to_dict(cache: RadixCache) -> Dict[str, Any]:
        scheme = cache.scheme
        return {
            "format": CACHE_FORMAT,
            "scheme": scheme.scheme_id,
            "public": scheme.public_key_to_dict(cache.public_key),
            "radix": cache.radix,
            "bit_width": cache.bit_width,
            "zero_pool_size": cache.zero_pool_size,
            "min_zero_inclusions": cache.min_zero_inclusions,
            "fan_in": cache.fan_in,
            "radix_ctxts": [scheme.ciphertext_to_dict(c) for c in cache.radix_ctxts],
            "zero_ctxts": [scheme.ciphertext_to_dict(c) for c in cache.zero_ctxts],
            "fingerprint": cache.fingerprint,
        }

    @staticmethod
    def cache_from_dict(payload: Dict[str, Any]) -> RadixCache:
        try:
            scheme = get_scheme(payload["scheme"])
            public_key = scheme.public_key_from_dict(payload["public"])
            cache = RadixCache(
                public_key=public_key,
                radix=int(payload["radix"]),
                bit_width=int(payload["bit_width"]),
                radix_ctxts=tuple(scheme.ciphertext_from_dict(public_key, c) for c in payload["radix_ctxts"]),
                zero_ctxts=tuple(scheme.ciphertext_from_dict(public_key, c) for c in payload["zero_ctxts"]),
                min_zero_inclusions=int(payload.get("min_zero_inclusions", 1)),
                fan_in=int(payload.get("fan_in", 1)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise SerializationError(f"Malformed cache container: {exc}") from exc

        if len(cache.zero_ctxts) != int(payload["zero_pool_size"]):
            raise SerializationError("Zero pool size does not match its header")
        expected = payload.get("fingerprint")
        if expected and expected != cache.fingerprint:
            raise SerializationError("Cache fingerprint mismatch; the file was modified")
        return cache

    def write_cache(self, path: PathLike, cache: RadixCache) -> Path:
        target = self.write_json(path, self.cache_to_dict(cache))
        logger.info("Wrote cache %s (%d entries) to %s", cache.fingerprint, cache.entry_count, target)
        return target

    def read_cache(self, path: PathLike) -> RadixCache:
        return self.cache_from_dict(self.read_json(path, CACHE_FORMAT))

    # Tensors

    def write_tensor_plain(self, path: PathLike, t: TensorPlain) -> Path:
        return self.write_json(path, {"format": TENSOR_PLAIN_FORMAT, **t.model_dump(mode="json")})

    def read_tensor_plain(self, path: PathLike) -> TensorPlain:
        payload = self.read_json(path, TENSOR_PLAIN_FORMAT)
        payload.pop("format")
        try:
            return TensorPlain(**payload)
        except ValidationError as exc:
            raise SerializationError(f"Malformed plaintext tensor: {exc}") from exc

    def write_tensor_cipher(self, path: PathLike, tc: TensorCipher, public_key: PublicKey) -> Path:
        scheme = get_scheme(public_key)
        return self.write_json(
            path,
            {
                "format": TENSOR_CIPHER_FORMAT,
                "scheme": scheme.scheme_id,
                "shape": list(tc.shape),
                "quant": tc.quant.model_dump(mode="json"),
                "fan_in": tc.fan_in,
                "cache_fingerprint": tc.cache_fingerprint,
                "ciphertexts": [scheme.ciphertext_to_dict(c) for c in tc.ciphertexts],
            },
        )

    def read_tensor_cipher(self, path: PathLike, public_key: PublicKey) -> TensorCipher:
        payload = self.read_json(path, TENSOR_CIPHER_FORMAT)
        scheme = get_scheme(public_key)
        try:
            return TensorCipher(
                shape=tuple(int(dim) for dim in payload["shape"]),
                ciphertexts=tuple(scheme.ciphertext_from_dict(public_key, c) for c in payload["ciphertexts"]),
                quant=QuantParams(**payload["quant"]),
                cache_fingerprint=payload["cache_fingerprint"],
                fan_in=int(payload.get("fan_in", 1)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise SerializationError(f"Malformed cipher tensor: {exc}") from exc

    def load_flat_tensor(
        self, path: PathLike, quant: QuantParams, shape: Optional[Sequence[int]] = None
    ) -> TensorPlain:
        """
        Import a flat workload file.

        ``.npy`` files are loaded with numpy.load, anything else as
        comma-separated text. Integer data is taken as already quantized;
        floating-point data is quantized with ``quant``.
        """
        source = self._resolve(path)
        try:
            arr = np.load(source) if source.suffix == ".npy" else np.loadtxt(source, delimiter=",", ndmin=1)
        except (OSError, ValueError) as exc:
            raise SerializationError(f"Cannot load tensor from {source}: {exc}") from exc
        if shape is not None:
            arr = arr.reshape(tuple(shape))

        if np.issubdtype(arr.dtype, np.integer):
            try:
                return TensorPlain(shape=list(arr.shape), values=arr.ravel().tolist(), quant=quant)
            except ValidationError as exc:
                raise SerializationError(f"{source} holds values outside the quantized range") from exc
        return quantize(arr, quant)

    # Reports

    def write_report(self, path: PathLike, report: BaseModel) -> Path:
        return self.write_json(path, report.model_dump(mode="json"))

    def write_report_csv(self, path: PathLike, report: BenchReport) -> Path:
        target = self._resolve(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        pd.DataFrame(report.to_flat_rows()).to_csv(target, index=False)
        return target
