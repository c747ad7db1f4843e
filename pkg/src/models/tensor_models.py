"""Quantization parameters and plaintext/ciphertext tensors."""

from dataclasses import dataclass
from enum import Enum
from math import prod
from typing import List, Tuple

import numpy as np
from pydantic import BaseModel, Field, computed_field, model_validator

from src.schemes import Ciphertext

WEIGHT_BIT_WIDTH = 16
WEIGHT_SCALE = 2.0 ** -8
IMAGE_BIT_WIDTH = 8
IMAGE_SCALE = 1.0


class QuantMode(str, Enum):
    UNSIGNED = "unsigned"
    SIGNED_OFFSET = "signed-offset"


class QuantParams(BaseModel):
    """Maps real values onto plaintext integers in ``[0, 2**bit_width)``."""

    scale: float = Field(..., gt=0, description="Real units per quantization step")
    bit_width: int = Field(..., ge=1, le=32, description="Plaintext bit width B")
    mode: QuantMode = Field(QuantMode.UNSIGNED, description="unsigned or signed-offset")

    @computed_field
    @property
    def offset(self) -> int:
        return 1 << (self.bit_width - 1) if self.mode == QuantMode.SIGNED_OFFSET else 0

    @property
    def max_value(self) -> int:
        return (1 << self.bit_width) - 1

    @classmethod
    def for_weights(cls) -> "QuantParams":
        return cls(scale=WEIGHT_SCALE, bit_width=WEIGHT_BIT_WIDTH, mode=QuantMode.SIGNED_OFFSET)

    @classmethod
    def for_images(cls) -> "QuantParams":
        return cls(scale=IMAGE_SCALE, bit_width=IMAGE_BIT_WIDTH, mode=QuantMode.UNSIGNED)


class TensorPlain(BaseModel):
    """
    Quantized tensor, flattened in row-major order.

    ``fan_in`` is 1 for a fresh tensor and k for the decrypted sum of k
    tensors; values then range over ``[0, fan_in * (2**B - 1)]``.
    """

    shape: List[int] = Field(..., description="Tensor dimensions")
    values: List[int] = Field(default_factory=list, description="Flat quantized values")
    quant: QuantParams
    fan_in: int = Field(1, ge=1, description="Number of tensors summed into this one")

    @model_validator(mode="after")
    def _check_values(self) -> "TensorPlain":
        if any(dim < 0 for dim in self.shape):
            raise ValueError(f"Negative dimension in shape {self.shape}")
        if len(self.values) != prod(self.shape):
            raise ValueError(
                f"Shape {self.shape} needs {prod(self.shape)} values, got {len(self.values)}"
            )
        if self.values:
            ceiling = self.fan_in * self.quant.max_value
            low, high = min(self.values), max(self.values)
            if low < 0 or high > ceiling:
                raise ValueError(f"Values must lie in [0, {ceiling}], got [{low}, {high}]")
        return self

    @property
    def size(self) -> int:
        return len(self.values)

    @property
    def nonzero_count(self) -> int:
        return sum(1 for value in self.values if value)

    @property
    def nonempty_rate(self) -> float:
        return self.nonzero_count / self.size if self.size else 0.0

    def to_numpy(self) -> np.ndarray:
        return np.asarray(self.values, dtype=np.int64).reshape(self.shape)


@dataclass(frozen=True)
class TensorCipher:
    """Element-wise ciphertexts of a TensorPlain."""

    shape: Tuple[int, ...]
    ciphertexts: Tuple[Ciphertext, ...]
    quant: QuantParams
    cache_fingerprint: str
    fan_in: int = 1

    @property
    def size(self) -> int:
        return len(self.ciphertexts)
