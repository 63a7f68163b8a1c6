"""Defines Dumbo authenticated encryption.

Block ``i`` of the message is encrypted under the expanded key
``K'_i = phi2(phi1^(i-1)(L))`` with ``L = P(K || 0^32)``:

.. code-block:: text

    C_i = M_i ^ P((N || 0^64) ^ K'_i) ^ K'_i

The tag absorbs the padded ``N || A`` blocks under the masks
``phi1^(i-1)(L)`` and the padded ciphertext blocks under
``phi2^2(phi1^(i-1)(L))``, then finalizes with ``P(T ^ L) ^ L``. Padding for
the tag appends the octet ``0x01`` followed by zero octets; the last message
block is zero-padded for the keystream and the ciphertext is truncated to the
message length.

Decryption returns ``None`` when the tag does not verify.
"""

import hmac
import math
from dataclasses import dataclass

import numpy as np

from setfalab.cipher.masking import expand_key, phi1, phi2
from setfalab.cipher.spongent import permute
from setfalab.core.state import STATE_BITS, STATE_OCTETS, State160, state_from_octets, state_to_bytes, state_to_octets


@dataclass(frozen=True)
class DumboParams:
    key_bits: int = 128
    nonce_bits: int = 96
    block_bits: int = 160
    tag_bits: int = 64

    @property
    def key_octets(self) -> int:
        return self.key_bits // 8

    @property
    def nonce_octets(self) -> int:
        return self.nonce_bits // 8

    @property
    def block_octets(self) -> int:
        return self.block_bits // 8

    @property
    def tag_octets(self) -> int:
        return self.tag_bits // 8


DUMBO = DumboParams()


def check_key(key: bytes) -> bytes:
    if len(key) != DUMBO.key_octets:
        raise ValueError(f"Expected a {DUMBO.key_octets}-octet key, got {len(key)} octets")
    return bytes(key)


def check_nonce(nonce: bytes) -> bytes:
    if len(nonce) != DUMBO.nonce_octets:
        raise ValueError(f"Expected a {DUMBO.nonce_octets}-octet nonce, got {len(nonce)} octets")
    return bytes(nonce)


def check_tag(tag: bytes) -> bytes:
    if len(tag) != DUMBO.tag_octets:
        raise ValueError(f"Expected a {DUMBO.tag_octets}-octet tag, got {len(tag)} octets")
    return bytes(tag)


@dataclass(frozen=True)
class AeadInputs:
    key: bytes
    nonce: bytes
    ad: bytes
    msg: bytes

    def __post_init__(self) -> None:
        check_key(self.key)
        check_nonce(self.nonce)

    @classmethod
    def random(cls, rng: np.random.Generator, msg_len: int, ad_len: int = 0) -> "AeadInputs":
        def draw(n: int) -> bytes:
            return rng.integers(0, 256, size=n, dtype=np.uint8).tobytes()

        return cls(key=draw(DUMBO.key_octets), nonce=draw(DUMBO.nonce_octets), ad=draw(ad_len), msg=draw(msg_len))


def nonce_block(nonce: bytes | np.ndarray) -> State160:
    """Returns ``N || 0^64``; accepts a batch of nonces as a ``(B, 12)`` array."""
    if isinstance(nonce, (bytes, bytearray)):
        check_nonce(nonce)
    elif np.shape(nonce)[-1:] != (DUMBO.nonce_octets,):
        raise ValueError(f"Expected nonces of {DUMBO.nonce_octets} octets, got an array of shape {np.shape(nonce)}")
    return state_from_octets(nonce)


def _blocks(data: bytes) -> State160:
    num_blocks = math.ceil(len(data) / STATE_OCTETS)
    padded = data.ljust(num_blocks * STATE_OCTETS, b"\x00")
    return state_from_octets(np.frombuffer(padded, dtype=np.uint8).reshape(num_blocks, STATE_OCTETS))


def _pad10_blocks(data: bytes) -> State160:
    return _blocks(data + b"\x01")


def _phi1_powers(base: State160, count: int) -> State160:
    powers = np.empty((count, STATE_BITS), dtype=np.uint8)
    x = base
    for i in range(count):
        powers[i] = x
        if i + 1 < count:
            x = phi1(x)
    return powers


def _masked_permute(blocks: State160, masks: State160) -> State160:
    return permute(blocks ^ masks) ^ masks


def _keystream(nonce: bytes, masks: State160, length: int) -> bytes:
    if length == 0:
        return b""
    stream = _masked_permute(np.broadcast_to(nonce_block(nonce), masks.shape), masks)
    return state_to_octets(stream).tobytes()[:length]


def _tag(base: State160, powers: State160, nonce: bytes, ad: bytes, ct: bytes) -> bytes:
    a_blocks = _pad10_blocks(nonce + ad)
    c_blocks = _pad10_blocks(ct)

    t = a_blocks[0].copy()
    if len(a_blocks) > 1:
        a_masks = powers[1 : len(a_blocks)]
        t ^= np.bitwise_xor.reduce(_masked_permute(a_blocks[1:], a_masks), axis=0)
    c_masks = phi2(phi2(powers[: len(c_blocks)]))
    t ^= np.bitwise_xor.reduce(_masked_permute(c_blocks, c_masks), axis=0)
    t = _masked_permute(t, base)
    return state_to_bytes(t)[: DUMBO.tag_octets]


def _num_masks(nonce: bytes, ad: bytes, text: bytes) -> int:
    num_msg = math.ceil(len(text) / STATE_OCTETS)
    num_ad = math.ceil((len(nonce) + len(ad) + 1) / STATE_OCTETS)
    num_ct = math.ceil((len(text) + 1) / STATE_OCTETS)
    return max(num_msg, num_ad, num_ct)


def _xor(a: bytes, b: bytes) -> bytes:
    return (np.frombuffer(a, dtype=np.uint8) ^ np.frombuffer(b, dtype=np.uint8)).tobytes()


def encrypt(key: bytes, nonce: bytes, ad: bytes, msg: bytes) -> tuple[bytes, bytes]:
    """Encrypts and authenticates a message.

    Args:
        key: The 16-octet key.
        nonce: The 12-octet nonce.
        ad: The associated data, of any length.
        msg: The message, of any length.

    Returns:
        The ciphertext (same length as ``msg``) and the 8-octet tag.
    """
    inputs = AeadInputs(key=key, nonce=nonce, ad=ad, msg=msg)
    base = permute(expand_key(inputs.key))
    powers = _phi1_powers(base, _num_masks(inputs.nonce, inputs.ad, inputs.msg))
    num_msg = math.ceil(len(inputs.msg) / STATE_OCTETS)
    ct = _xor(inputs.msg, _keystream(inputs.nonce, phi2(powers[:num_msg]), len(inputs.msg)))
    return ct, _tag(base, powers, inputs.nonce, inputs.ad, ct)


def decrypt(key: bytes, nonce: bytes, ad: bytes, ct: bytes, tag: bytes) -> bytes | None:
    """Verifies and decrypts a ciphertext.

    Args:
        key: The 16-octet key.
        nonce: The 12-octet nonce.
        ad: The associated data.
        ct: The ciphertext.
        tag: The 8-octet tag.

    Returns:
        The message, or ``None`` if the tag does not verify.
    """
    key, nonce, tag = check_key(key), check_nonce(nonce), check_tag(tag)
    base = permute(expand_key(key))
    powers = _phi1_powers(base, _num_masks(nonce, ad, ct))
    expected = _tag(base, powers, nonce, ad, ct)
    if not hmac.compare_digest(expected, tag):
        return None
    num_msg = math.ceil(len(ct) / STATE_OCTETS)
    return _xor(ct, _keystream(nonce, phi2(powers[:num_msg]), len(ct)))


def encrypt_block1_keystream(key: bytes, nonce: bytes | np.ndarray) -> State160:
    """Fault-free ``P((N || 0^64) ^ K'_1) ^ K'_1`` as a full 160-bit state."""
    k1 = phi2(permute(expand_key(check_key(key))))
    return _masked_permute(nonce_block(nonce), k1)
