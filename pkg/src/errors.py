"""Exception hierarchy for the cached homomorphic encryption engine."""

from typing import Optional


class ChemError(Exception):
    """Base exception for every error raised by this package."""


class PlaintextRangeError(ChemError, ValueError):
    """Raised when a plaintext lies outside the accepted message range."""


class MalformedCiphertextError(ChemError, ValueError):
    """Raised when a ciphertext is out of range or of the wrong scheme."""


class KeyContextError(ChemError):
    """Raised when values produced under different public keys are combined."""


class CapacityError(ChemError, ValueError):
    """Raised when a plaintext span or aggregate would exceed the scheme modulus."""


class KeyGenerationError(ChemError):
    """Raised when a key pair cannot be generated or validated."""


class QuantizationError(ChemError, ValueError):
    """Raised for non-finite input or invalid quantization parameters."""


class ScanBudgetError(ChemError, ValueError):
    """Raised when a brute-force scan would exceed its budget."""


class ConfigurationError(ChemError, ValueError):
    """Raised for invalid command-line or environment configuration."""


class SerializationError(ChemError, ValueError):
    """Raised when a stored key, cache or tensor container is malformed."""


class TensorDecryptionError(ChemError):
    """Raised when one element of a cipher tensor fails to decrypt."""

    def __init__(self, index: int, cause: Optional[Exception] = None):
        self.index = index
        self.cause = cause
        detail = f": {cause}" if cause is not None else ""
        super().__init__(f"Element {index} failed to decrypt{detail}")
