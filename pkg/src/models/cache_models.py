"""Per-element value objects used while assembling cached ciphertexts."""

from dataclasses import dataclass
from typing import Tuple


@dataclass(frozen=True)
class RadixDigits:
    """Radix-r digits of a plaintext, least significant first."""

    digits: Tuple[int, ...]
    radix: int

    def value(self) -> int:
        """Reconstruct the source plaintext."""
        total = 0
        for digit in reversed(self.digits):
            total = total * self.radix + digit
        return total

    def digit_sum(self) -> int:
        return sum(self.digits)


@dataclass(frozen=True)
class ZeroMask:
    """Which zero-pool entries randomize one ciphertext."""

    included: Tuple[bool, ...]
    rnd: int

    def indices(self) -> Tuple[int, ...]:
        return tuple(i for i, flag in enumerate(self.included) if flag)


@dataclass
class AdditionCounter:
    """Homomorphic additions performed, split by purpose."""

    digit_join: int = 0
    randomizer: int = 0

    @property
    def total(self) -> int:
        return self.digit_join + self.randomizer

    def merge(self, other: "AdditionCounter") -> None:
        self.digit_join += other.digit_join
        self.randomizer += other.randomizer
