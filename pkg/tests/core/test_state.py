"""Tests the 160-bit state helpers."""

import numpy as np
import pytest

import setfalab
from setfalab.core.state import STATE_BITS, random_states, state_to_bytes, zero_state


def test_bit_numbering() -> None:
    x = setfalab.state_from_octets(b"\x01\x80")
    assert x.shape == (STATE_BITS,)
    assert np.flatnonzero(x).tolist() == [0, 15]


def test_nibble_numbering() -> None:
    x = setfalab.state_from_octets(b"\xe5")
    nibbles = setfalab.get_nibbles(x)
    assert nibbles.shape == (40,)
    assert nibbles[0] == 0x5
    assert nibbles[1] == 0xE
    assert (nibbles[2:] == 0).all()


def test_nibble_round_trip(rng: np.random.Generator) -> None:
    x = random_states(rng, 32)
    assert (setfalab.set_nibbles(setfalab.get_nibbles(x)) == x).all()


def test_octets_are_zero_padded() -> None:
    x = setfalab.state_from_octets(bytes(range(1, 13)))
    assert state_to_bytes(x) == bytes(range(1, 13)) + bytes(8)


def test_too_many_octets() -> None:
    with pytest.raises(ValueError):
        setfalab.state_from_octets(bytes(21))


def test_hex() -> None:
    x = setfalab.state_from_octets(bytes(range(20)))
    assert setfalab.state_to_hex(x) == bytes(range(20)).hex()
    assert (setfalab.state_from_hex(setfalab.state_to_hex(x)) == x).all()
    assert setfalab.state_to_hex(zero_state()) == "0" * 40

    with pytest.raises(ValueError):
        setfalab.state_from_hex("00" * 19)


def test_batched_octets(rng: np.random.Generator) -> None:
    octets = rng.integers(0, 256, size=(3, 5, 20), dtype=np.uint8)
    x = setfalab.state_from_octets(octets)
    assert x.shape == (3, 5, STATE_BITS)
    assert (setfalab.state_to_octets(x) == octets).all()
