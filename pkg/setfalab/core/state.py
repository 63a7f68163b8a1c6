"""Defines helpers for the 160-bit permutation state.

A state is a numpy ``uint8`` array of shape ``(..., 160)`` with one bit per
element. Bit ``j`` of the state is bit ``j mod 8`` of octet ``j // 8``, and
nibble ``i`` occupies bits ``4i .. 4i + 3``, with bit ``4i + 3`` as the
nibble's most significant bit. Every helper broadcasts over the leading
dimensions, so a batch of states is just a ``(B, 160)`` array.
"""

import numpy as np

State160 = np.ndarray

STATE_BITS = 160
STATE_OCTETS = STATE_BITS // 8
STATE_NIBBLES = STATE_BITS // 4

_NIBBLE_WEIGHTS = np.array([1, 2, 4, 8], dtype=np.uint8)
_NIBBLE_SHIFTS = np.arange(4, dtype=np.uint8)


def zero_state(*batch: int) -> State160:
    return np.zeros((*batch, STATE_BITS), dtype=np.uint8)


def check_state(x: State160) -> State160:
    if x.shape[-1:] != (STATE_BITS,):
        raise ValueError(f"Expected a state with trailing dimension {STATE_BITS}, got shape {x.shape}")
    return x


def state_from_octets(octets: bytes | np.ndarray) -> State160:
    """Converts octets to a state, zero-padding up to 20 octets.

    Args:
        octets: Up to 20 octets, or a ``(..., n)`` ``uint8`` array with
            ``n <= 20``.

    Returns:
        The state, with shape ``(..., 160)``.

    Raises:
        ValueError: If more than 20 octets are given.
    """
    arr = np.frombuffer(octets, dtype=np.uint8) if isinstance(octets, (bytes, bytearray)) else np.asarray(octets)
    arr = arr.astype(np.uint8, copy=False)
    if arr.shape[-1] > STATE_OCTETS:
        raise ValueError(f"A state holds at most {STATE_OCTETS} octets, got {arr.shape[-1]}")
    if arr.shape[-1] < STATE_OCTETS:
        pad = [(0, 0)] * (arr.ndim - 1) + [(0, STATE_OCTETS - arr.shape[-1])]
        arr = np.pad(arr, pad)
    return np.unpackbits(arr, axis=-1, bitorder="little")


def state_to_octets(x: State160) -> np.ndarray:
    return np.packbits(check_state(x), axis=-1, bitorder="little")


def state_to_bytes(x: State160) -> bytes:
    assert x.ndim == 1, f"Expected a single state, got shape {x.shape}"
    return state_to_octets(x).tobytes()


def state_to_hex(x: State160) -> str:
    """Formats a single state as 40 lowercase hex digits, octet 0 first."""
    return state_to_bytes(x).hex()


def state_from_hex(s: str) -> State160:
    raw = bytes.fromhex(s)
    if len(raw) != STATE_OCTETS:
        raise ValueError(f"Expected {2 * STATE_OCTETS} hex digits, got {len(s)}")
    return state_from_octets(raw)


def get_nibbles(x: State160) -> np.ndarray:
    """Reads the 40 nibbles of a state.

    Args:
        x: The state, with shape ``(..., 160)``.

    Returns:
        The nibble values, with shape ``(..., 40)``.
    """
    x = check_state(x)
    groups = x.reshape(*x.shape[:-1], STATE_NIBBLES, 4)
    return (groups * _NIBBLE_WEIGHTS).sum(-1, dtype=np.uint8)


def set_nibbles(nibbles: np.ndarray) -> State160:
    """Builds a state from nibble values, the inverse of :func:`get_nibbles`."""
    nibbles = np.asarray(nibbles, dtype=np.uint8)
    assert nibbles.shape[-1] == STATE_NIBBLES, f"Expected {STATE_NIBBLES} nibbles, got shape {nibbles.shape}"
    bits = (nibbles[..., None] >> _NIBBLE_SHIFTS) & 1
    return bits.reshape(*nibbles.shape[:-1], STATE_BITS)


def random_states(rng: np.random.Generator, *batch: int) -> State160:
    return rng.integers(0, 2, size=(*batch, STATE_BITS), dtype=np.uint8)
