"""Defines the word-LFSR masking layer of Dumbo.

``phi1`` clocks the 20-octet LFSR once: the new last octet is
``(x0 <<< 3) ^ (x3 << 7) ^ (x13 >> 7)`` and the other octets shift down by
one position. ``phi2`` is ``phi1 ^ id``, and the mask for exponents ``(a, b)``
is ``phi2^a ∘ phi1^b ∘ P(K || 0^32)``.
"""

import functools
from typing import Callable, Literal

import numpy as np

from setfalab.cipher.gf2 import Bin160Map, invert_map, matrix_of
from setfalab.cipher.spongent import permute
from setfalab.core.state import State160, check_state, state_from_octets, state_to_octets

KEY_OCTETS = 16

LinearMapName = Literal["phi1", "phi2"]


def _phi1_octets(octets: np.ndarray) -> np.ndarray:
    x = octets.astype(np.uint16)
    x0, x3, x13 = x[..., 0], x[..., 3], x[..., 13]
    new = (((x0 << 3) | (x0 >> 5)) ^ (x3 << 7) ^ (x13 >> 7)) & 0xFF
    return np.concatenate([octets[..., 1:], new[..., None].astype(np.uint8)], axis=-1)


def phi1(x: State160) -> State160:
    return state_from_octets(_phi1_octets(state_to_octets(check_state(x))))


def phi2(x: State160) -> State160:
    return phi1(x) ^ x


def expand_key(key: bytes) -> State160:
    """Returns ``K || 0^32`` as a state."""
    if len(key) != KEY_OCTETS:
        raise ValueError(f"Expected a {KEY_OCTETS}-octet key, got {len(key)} octets")
    return state_from_octets(key)


def mask_from_base(base: State160, a: int, b: int) -> State160:
    """Applies ``phi2^a ∘ phi1^b`` to an already-permuted key state."""
    if a < 0 or b < 0:
        raise ValueError(f"Mask exponents must be non-negative, got a={a}, b={b}")
    x = base
    for _ in range(b):
        x = phi1(x)
    for _ in range(a):
        x = phi2(x)
    return x


def mask(key: bytes, a: int, b: int) -> State160:
    """Computes ``mask(K, a, b) = phi2^a ∘ phi1^b ∘ P(K || 0^32)``.

    The permutation always uses the fault-free Sbox.

    Args:
        key: The 16-octet key.
        a: Number of ``phi2`` applications.
        b: Number of ``phi1`` applications.

    Returns:
        The mask state.
    """
    return mask_from_base(permute(expand_key(key)), a, b)


def expanded_key(key: bytes, block_index: int = 1) -> State160:
    """The key ``K'_i`` masking encryption block ``i`` (1-indexed)."""
    if block_index < 1:
        raise ValueError(f"Block indices start at 1, got {block_index}")
    return mask(key, 1, block_index - 1)


def linear_map_matrix(name: LinearMapName, phi1_power: int = 0) -> Bin160Map:
    """Builds the matrix of ``phi1``, or of ``phi2 ∘ phi1^b``.

    Args:
        name: Which map to build.
        phi1_power: For ``phi2``, the number ``b`` of ``phi1`` applications
            that precede it.

    Returns:
        The ``(160, 160)`` GF(2) matrix.
    """
    fn: Callable[[State160], State160]
    match name:
        case "phi1":
            if phi1_power != 0:
                raise ValueError("phi1_power only applies to phi2")
            fn = phi1
        case "phi2":
            fn = functools.partial(mask_from_base, a=1, b=phi1_power)
        case _:
            raise ValueError(f"Unknown linear map: {name}")
    return matrix_of(fn)


@functools.lru_cache(maxsize=None)
def _inverse_phi2_cached() -> Bin160Map:
    inv = invert_map(linear_map_matrix("phi2"))
    inv.flags.writeable = False
    return inv


def inverse_phi2_matrix() -> Bin160Map:
    return _inverse_phi2_cached()

