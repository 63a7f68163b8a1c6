"""Tests the LFSR masking layer."""

from typing import Callable

import numpy as np
import pytest

import setfalab
from setfalab.cipher.gf2 import apply, compose, identity, rank
from setfalab.cipher.masking import expand_key, expanded_key, inverse_phi2_matrix, mask_from_base
from setfalab.core.state import random_states, state_to_bytes, zero_state


def octet_state(index: int, value: int) -> np.ndarray:
    octets = bytearray(20)
    octets[index] = value
    return setfalab.state_from_octets(bytes(octets))


def test_phi1_examples() -> None:
    assert (setfalab.phi1(zero_state()) == 0).all()
    assert state_to_bytes(setfalab.phi1(octet_state(0, 0x01))) == state_to_bytes(octet_state(19, 0x08))

    y = setfalab.state_to_octets(setfalab.phi1(octet_state(3, 0x01)))
    assert y[2] == 0x01
    assert y[19] == 0x80
    assert np.count_nonzero(y) == 2

    y = setfalab.state_to_octets(setfalab.phi1(octet_state(13, 0x80)))
    assert y[12] == 0x80
    assert y[19] == 0x01


def test_phi2_examples(rng: np.random.Generator) -> None:
    y = setfalab.state_to_octets(setfalab.phi2(octet_state(0, 0x01)))
    assert y[0] == 0x01
    assert y[19] == 0x08
    x = random_states(rng, 10)
    assert (setfalab.phi2(x) ^ setfalab.phi1(x) == x).all()


@pytest.mark.parametrize("fn", [setfalab.phi1, setfalab.phi2])
def test_linearity(rng: np.random.Generator, fn: Callable[[np.ndarray], np.ndarray]) -> None:
    x, y = random_states(rng, 1000), random_states(rng, 1000)
    assert (fn(x ^ y) == fn(x) ^ fn(y)).all()


def test_matrices(rng: np.random.Generator) -> None:
    m1 = setfalab.linear_map_matrix("phi1")
    m2 = setfalab.linear_map_matrix("phi2")
    assert rank(m1) == 160
    assert rank(m2) == 160
    x = random_states(rng, 100)
    assert (apply(m1, x) == setfalab.phi1(x)).all()
    assert (apply(m2, x) == setfalab.phi2(x)).all()
    assert (compose(inverse_phi2_matrix(), m2) == identity()).all()

    m = setfalab.linear_map_matrix("phi2", phi1_power=3)
    assert (apply(m, x) == mask_from_base(x, 1, 3)).all()
    with pytest.raises(ValueError):
        setfalab.linear_map_matrix("phi1", phi1_power=1)


def test_mask_identities(rng: np.random.Generator) -> None:
    key = rng.bytes(16)
    base = setfalab.permute(expand_key(key))
    assert (setfalab.mask(key, 0, 0) == base).all()
    assert (setfalab.mask(key, 0, 2) == setfalab.phi1(setfalab.phi1(base))).all()
    assert (setfalab.mask(key, 1, 0) ^ setfalab.mask(key, 0, 1) ^ setfalab.mask(key, 0, 0) == 0).all()
    assert (expanded_key(key, 1) == setfalab.phi2(base)).all()
    assert (expanded_key(key, 3) == mask_from_base(base, 1, 2)).all()


def test_expanded_keys_are_distinct(rng: np.random.Generator) -> None:
    keys = np.stack([expand_key(rng.bytes(16)) for _ in range(100)])
    bases = setfalab.permute(keys)
    expanded = np.stack([mask_from_base(bases, 1, i) for i in range(16)], axis=1)
    for per_key in np.packbits(expanded, axis=-1):
        assert len({row.tobytes() for row in per_key}) == 16


def test_errors() -> None:
    with pytest.raises(ValueError):
        expand_key(bytes(15))
    with pytest.raises(ValueError):
        setfalab.mask(bytes(16), -1, 0)
    with pytest.raises(ValueError):
        expanded_key(bytes(16), 0)
