"""Defines the 160-bit Spongent permutation.

The Sbox table is an explicit argument, so the ciphertext path can run with a
faulty table while the mask path stays fault-free. All functions take states
of shape ``(..., 160)`` (see :mod:`setfalab.core.state`) and broadcast over
the leading dimensions.

Round ``r`` (1-indexed) adds the constant derived from the ``r``-th iCounter
value, where round 1 uses the seed ``0b1000101`` itself, then applies the
Sbox layer and the bit permutation.
"""

import functools

import numpy as np

from setfalab.cipher.sbox import SPONGENT_SBOX, SboxTable
from setfalab.core.state import STATE_BITS, State160, check_state, get_nibbles, set_nibbles, zero_state

NUM_ROUNDS = 80
ICOUNTER_BITS = 7
ICOUNTER_SEED = 0b1000101
ICOUNTER_PERIOD = 127


class ZeroCounterError(ValueError):
    """Raised when the iCounter LFSR is stepped from the all-zero state."""


class NonBijectiveSboxError(ValueError):
    """Raised when inverting the permutation under a table with no inverse."""


def icounter_next(value: int) -> int:
    """Steps the 7-bit iCounter LFSR with feedback polynomial x^7 + x^6 + 1.

    Args:
        value: The current counter, in ``[1, 127]``.

    Returns:
        The next counter value; the feedback bit ``b6 ^ b5`` becomes ``b0``.

    Raises:
        ZeroCounterError: If the counter is zero.
        ValueError: If the counter does not fit in 7 bits.
    """
    if value == 0:
        raise ZeroCounterError("The iCounter LFSR is degenerate in the all-zero state")
    if not 0 < value < (1 << ICOUNTER_BITS):
        raise ValueError(f"iCounter value must fit in {ICOUNTER_BITS} bits, got {value}")
    feedback = ((value >> 6) ^ (value >> 5)) & 1
    return ((value << 1) | feedback) & 0x7F


def icounter_sequence(num_rounds: int = NUM_ROUNDS, seed: int = ICOUNTER_SEED) -> list[int]:
    values = [seed]
    while len(values) < num_rounds:
        values.append(icounter_next(values[-1]))
    return values


def round_constant(counter: int) -> State160:
    """Builds ``Rc xor Rev_Rc`` for one counter value.

    ``Rc`` holds counter bit ``b_i`` at state bit ``i``; ``Rev_Rc`` reverses
    all 160 bits, putting ``b_i`` at bit ``159 - i``.
    """
    rc = zero_state()
    for i in range(ICOUNTER_BITS):
        rc[i] = (counter >> i) & 1
    return rc ^ rc[::-1]


@functools.lru_cache(maxsize=None)
def _round_constants() -> np.ndarray:
    constants = np.stack([round_constant(c) for c in icounter_sequence()])
    constants.flags.writeable = False
    return constants


def add_round_constant(x: State160, counter: int) -> State160:
    return check_state(x) ^ round_constant(counter)


def sbox_layer(x: State160, table: SboxTable) -> State160:
    return set_nibbles(table.array[get_nibbles(x)])


def player_position(j: int) -> int:
    """Destination of state bit ``j`` under the bit permutation."""
    if not 0 <= j < STATE_BITS:
        raise ValueError(f"Bit index out of range: {j}")
    return STATE_BITS - 1 if j == STATE_BITS - 1 else (40 * j) % (STATE_BITS - 1)


def player_inverse_position(j: int) -> int:
    if not 0 <= j < STATE_BITS:
        raise ValueError(f"Bit index out of range: {j}")
    return STATE_BITS - 1 if j == STATE_BITS - 1 else (4 * j) % (STATE_BITS - 1)


# PLAYER[j] is where bit j goes; PLAYER_INV[k] is where bit k comes from.
PLAYER = np.array([player_position(j) for j in range(STATE_BITS)], dtype=np.intp)
PLAYER_INV = np.array([player_inverse_position(j) for j in range(STATE_BITS)], dtype=np.intp)


def p_layer(x: State160) -> State160:
    return check_state(x)[..., PLAYER_INV]


def p_layer_inv(x: State160) -> State160:
    return check_state(x)[..., PLAYER]


def permute(x: State160, table: SboxTable = SPONGENT_SBOX, *, final_table: SboxTable | None = None) -> State160:
    """Applies the 80-round permutation.

    Args:
        x: The input state(s), with shape ``(..., 160)``.
        table: The Sbox table used by the Sbox layer of every round.
        final_table: If set, overrides ``table`` in the last round only.

    Returns:
        The permuted state(s), with the same shape as ``x``.
    """
    x = check_state(x)
    constants = _round_constants()
    for r in range(NUM_ROUNDS):
        round_table = final_table if final_table is not None and r == NUM_ROUNDS - 1 else table
        x = x ^ constants[r]
        x = sbox_layer(x, round_table)
        x = p_layer(x)
    return x


def permute_inv(x: State160, table: SboxTable = SPONGENT_SBOX) -> State160:
    """Inverts :func:`permute` for a bijective Sbox table.

    Args:
        x: The output state(s), with shape ``(..., 160)``.
        table: The Sbox table that was used in the forward direction.

    Returns:
        The input state(s).

    Raises:
        NonBijectiveSboxError: If the table is not a bijection.
    """
    if not table.is_bijective:
        raise NonBijectiveSboxError(f"Sbox table {table.to_hex()} has no inverse; missing {sorted(table.missing)}")
    inv_table = table.inverse()
    x = check_state(x)
    constants = _round_constants()
    for r in reversed(range(NUM_ROUNDS)):
        x = p_layer_inv(x)
        x = sbox_layer(x, inv_table)
        x = x ^ constants[r]
    return x
