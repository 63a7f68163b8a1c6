"""Defines 4-bit Sbox lookup tables."""

import functools
from dataclasses import dataclass

import numpy as np

SPONGENT_SBOX_ENTRIES = (0xE, 0xD, 0xB, 0x0, 0x2, 0x1, 0x4, 0xF, 0x7, 0xA, 0x8, 0x5, 0x9, 0xC, 0x3, 0x6)


@dataclass(frozen=True)
class SboxTable:
    """A nibble to nibble mapping, indexed by the input nibble.

    Faulty tables produced by a faulted circuit need not be bijections.
    """

    entries: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.entries) != 16:
            raise ValueError(f"An Sbox table has 16 entries, got {len(self.entries)}")
        if any(not 0 <= v <= 15 for v in self.entries):
            raise ValueError(f"Sbox entries must be nibbles, got {self.entries}")
        object.__setattr__(self, "entries", tuple(int(v) for v in self.entries))

    def __getitem__(self, x: int) -> int:
        return self.entries[x]

    @functools.cached_property
    def array(self) -> np.ndarray:
        arr = np.array(self.entries, dtype=np.uint8)
        arr.flags.writeable = False
        return arr

    @property
    def image(self) -> frozenset[int]:
        return frozenset(self.entries)

    @property
    def missing(self) -> frozenset[int]:
        return frozenset(range(16)) - self.image

    @property
    def is_bijective(self) -> bool:
        return len(self.image) == 16

    def inverse(self) -> "SboxTable":
        if not self.is_bijective:
            raise ValueError(f"Sbox table {self.to_hex()} is not a bijection")
        inv = [0] * 16
        for x, y in enumerate(self.entries):
            inv[y] = x
        return SboxTable(tuple(inv))

    def to_hex(self) -> str:
        return "".join(f"{v:x}" for v in self.entries)

    @classmethod
    def from_hex(cls, s: str) -> "SboxTable":
        return cls(tuple(int(c, 16) for c in s))

    @classmethod
    def identity(cls) -> "SboxTable":
        return cls(tuple(range(16)))


SPONGENT_SBOX = SboxTable(SPONGENT_SBOX_ENTRIES)
