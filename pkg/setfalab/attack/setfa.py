"""Defines the statistical SET fault attack on the first Dumbo block.

The attacker faults the Sbox circuit of the ciphertext-path permutation and
collects first-block ciphertexts under fresh nonces. With a known first
message block ``M1``, ``I'1 = C'1 ^ M1`` equals the faulty permutation output
masked by the expanded key ``K'``. Undoing the final bit permutation exposes,
per nibble ``s``, the last Sbox layer output XOR four bits of ``K'``:

.. code-block:: text

    nibble_s(p_layer_inv(I'1)) = S_faulty(...) ^ kappa_s

Since ``S_faulty`` never outputs a missing value, a guess ``kappa`` is wrong
whenever ``observed ^ kappa`` is missing. Once every nibble has one survivor,
``K'`` is reassembled, ``L = phi2^-1(K')`` is computed by GF(2) inversion and
``P^-1(L)`` yields ``K || 0^32``.
"""

import functools
import logging
from dataclasses import dataclass
from typing import Literal, cast, get_args

import numpy as np

from setfalab.cipher.dumbo import DUMBO, encrypt, encrypt_block1_keystream, nonce_block
from setfalab.cipher.gf2 import apply
from setfalab.cipher.masking import KEY_OCTETS, expanded_key, inverse_phi2_matrix
from setfalab.cipher.sbox import SPONGENT_SBOX, SboxTable
from setfalab.cipher.spongent import p_layer, p_layer_inv, permute, permute_inv
from setfalab.circuit.netlist import FaultMap, canonical_netlist, faulty_truth_table
from setfalab.core.conf import field
from setfalab.core.state import (
    STATE_NIBBLES,
    STATE_OCTETS,
    State160,
    get_nibbles,
    set_nibbles,
    state_from_octets,
    state_to_bytes,
)

logger = logging.getLogger(__name__)

FaultScope = Literal["all", "last"]
AttackerModel = Literal["kpa", "cpa"]

SEED_MASK = (1 << 64) - 1


class ModelInconsistencyError(RuntimeError):
    """Raised when elimination removes the true key guess of a nibble."""


class NotConvergedError(RuntimeError):
    """Raised when reassembling ``K'`` while some nibble has several survivors."""

    def __init__(self, survivors: np.ndarray) -> None:
        self.survivors = np.asarray(survivors)
        super().__init__(f"not converged; survivors per nibble: {self.survivors.tolist()}")


class InversionSanityError(RuntimeError):
    """Raised when the inverted permutation leaves nonzero padding bits."""


def cast_fault_scope(s: str) -> FaultScope:
    args = get_args(FaultScope)
    assert s in args, f"Invalid fault scope {s}; must be one of {args}"
    return cast(FaultScope, s)


def cast_attacker_model(s: str) -> AttackerModel:
    args = get_args(AttackerModel)
    assert s in args, f"Invalid attacker model {s}; must be one of {args}"
    return cast(AttackerModel, s)


@dataclass
class AttackConfig:
    fault: str = field("", help="The SET faults, as w<id>=<0|1> terms joined by commas; empty for a control run")
    scope: str = field("all", help="Faulty Sbox in every ciphertext-path round ('all') or the last one ('last')")
    max_queries: int = field(250, help="The number of faulty ciphertexts collected per trial")
    attacker_model: str = field("kpa", help="Random known first block ('kpa') or an all-zero chosen one ('cpa')")
    seed: int = field(1337, help="The random seed; trial i uses seed ^ i")
    check_soundness: bool = field(True, help="If set, verify after each query that the true key guess survives")

    def __post_init__(self) -> None:
        if self.max_queries < 1:
            raise ValueError(f"max_queries must be at least 1, got {self.max_queries}")
        if self.scope not in get_args(FaultScope):
            raise ValueError(f"Invalid fault scope {self.scope}; must be one of {get_args(FaultScope)}")
        if self.attacker_model not in get_args(AttackerModel):
            raise ValueError(f"Invalid attacker model {self.attacker_model}; must be one of {get_args(AttackerModel)}")
        FaultMap.from_spec(self.fault, canonical_netlist())

    @property
    def fault_map(self) -> FaultMap:
        return FaultMap.from_spec(self.fault, canonical_netlist())

    @property
    def fault_scope(self) -> FaultScope:
        return cast_fault_scope(self.scope)


@functools.lru_cache(maxsize=None)
def ciphertext_path_tables(fault_map: FaultMap, scope: FaultScope) -> tuple[SboxTable, SboxTable | None]:
    """Returns the ``(table, final_table)`` pair for :func:`permute`.

    Args:
        fault_map: The faults on the canonical netlist.
        scope: Which rounds see the faulty table.

    Returns:
        The table for every round, and the override for the last round.
    """
    faulty = faulty_truth_table(canonical_netlist(), fault_map)
    match cast_fault_scope(scope):
        case "all":
            return faulty, None
        case "last":
            return SPONGENT_SBOX, faulty
    raise AssertionError(scope)


def faulty_encrypt_block1(
    key: bytes,
    nonce: bytes | np.ndarray,
    m1: bytes,
    fault_map: FaultMap,
    scope: FaultScope = "all",
) -> State160:
    """Encrypts a full first block with the ciphertext-path Sbox faulted.

    The mask ``K'1 = phi2(P(K || 0^32))`` is computed with the fault-free
    permutation.

    Args:
        key: The 16-octet key.
        nonce: One 12-octet nonce, or a ``(B, 12)`` array of nonces.
        m1: The 20-octet first message block.
        fault_map: The faults on the canonical netlist.
        scope: Which rounds of the ciphertext path are faulted.

    Returns:
        ``C'1`` as a state, or a ``(B, 160)`` batch of states.
    """
    if len(m1) != STATE_OCTETS:
        raise ValueError(f"The first block must be {STATE_OCTETS} octets, got {len(m1)}")
    if fault_map.order == 0:
        return state_from_octets(m1) ^ encrypt_block1_keystream(key, nonce)
    table, final_table = ciphertext_path_tables(fault_map, scope)
    k1 = expanded_key(key)
    y = permute(nonce_block(nonce) ^ k1, table, final_table=final_table)
    return state_from_octets(m1) ^ y ^ k1


def observed_nibbles(i1: State160) -> np.ndarray:
    """Reads the 40 masked Sbox-output nibbles of one or more ``I'1`` states."""
    return get_nibbles(p_layer_inv(i1))


def extract_candidate_nibble(i1: State160, s: int, kappa: int) -> int:
    """Returns the last-round Sbox output at nibble ``s`` under key guess ``kappa``.

    Args:
        i1: The faulty intermediate ``C'1 ^ M1``.
        s: The nibble position, in ``[0, 40)``.
        kappa: The guess for the ``K'`` bits at ``PLAYER[4s .. 4s + 3]``,
            with the bit at ``PLAYER[4s + 3]`` as its MSB.

    Returns:
        The hypothesised Sbox output nibble.
    """
    if not 0 <= s < STATE_NIBBLES:
        raise ValueError(f"Nibble position out of range: {s}")
    if not 0 <= kappa <= 15:
        raise ValueError(f"Key guess must be a nibble, got {kappa}")
    return int(observed_nibbles(i1)[s]) ^ kappa


def expanded_key_nibbles(k_prime: State160) -> np.ndarray:
    """The per-nibble key guesses that are correct for ``k_prime``."""
    return get_nibbles(p_layer_inv(k_prime))


def _missing_mask(missing: frozenset[int] | set[int]) -> np.ndarray:
    if not missing:
        raise ValueError("Elimination needs at least one missing value")
    mask = np.zeros(16, dtype=bool)
    mask[sorted(missing)] = True
    return mask


@dataclass(frozen=True, eq=False)
class NibbleCandidates:
    """Surviving key guesses, as a ``(40, 16)`` boolean array.

    Parameters:
        alive: ``alive[s, kappa]`` is set while ``kappa`` is viable at nibble
            ``s``.
    """

    alive: np.ndarray

    def __post_init__(self) -> None:
        assert self.alive.shape == (STATE_NIBBLES, 16), f"Unexpected candidate shape {self.alive.shape}"

    @classmethod
    def full(cls) -> "NibbleCandidates":
        return cls(np.ones((STATE_NIBBLES, 16), dtype=bool))

    @classmethod
    def from_expanded_key(cls, k_prime: State160, offsets: frozenset[int] = frozenset({0})) -> "NibbleCandidates":
        """Candidates holding ``true ^ delta`` for every ``delta`` in ``offsets``."""
        alive = np.zeros((STATE_NIBBLES, 16), dtype=bool)
        true = expanded_key_nibbles(k_prime)
        for delta in offsets:
            alive[np.arange(STATE_NIBBLES), true ^ delta] = True
        return cls(alive)

    def counts(self) -> np.ndarray:
        return self.alive.sum(axis=1)

    def survivors(self, s: int) -> frozenset[int]:
        return frozenset(int(k) for k in np.flatnonzero(self.alive[s]))

    @property
    def converged(self) -> bool:
        return bool((self.counts() == 1).all())

    def contains(self, kappas: np.ndarray) -> bool:
        return bool(self.alive[np.arange(STATE_NIBBLES), kappas].all())


def eliminate(candidates: NibbleCandidates, i1: State160, missing: frozenset[int] | set[int]) -> NibbleCandidates:
    """Removes every guess that would put a missing value at the Sbox output.

    Args:
        candidates: The current candidates.
        i1: One ``I'1`` state, or a ``(B, 160)`` batch of them.
        missing: The values the faulty Sbox never outputs.

    Returns:
        The remaining candidates.

    Raises:
        ValueError: If ``missing`` is empty.
        ModelInconsistencyError: If some nibble has no candidate left.
    """
    mask = _missing_mask(missing)
    obs = observed_nibbles(i1).reshape(-1, STATE_NIBBLES)
    hits = mask[obs[:, :, None] ^ np.arange(16, dtype=np.uint8)].any(axis=0)
    alive = candidates.alive & ~hits
    if (empty := np.flatnonzero(~alive.any(axis=1))).size:
        raise ModelInconsistencyError(
            f"nibbles {empty.tolist()} lost every candidate; the missing set {sorted(missing)} "
            "or the fault scope does not match the oracle"
        )
    return NibbleCandidates(alive)


def recover_expanded_key(candidates: NibbleCandidates) -> State160:
    """Writes the single surviving guess of every nibble into ``K'``.

    Raises:
        NotConvergedError: If some nibble has more than one survivor.
    """
    counts = candidates.counts()
    if (counts != 1).any():
        raise NotConvergedError(counts)
    kappas = candidates.alive.argmax(axis=1).astype(np.uint8)
    return p_layer(set_nibbles(kappas))


def recover_master_key(k_prime: State160) -> bytes:
    """Inverts ``K' = phi2(P(K || 0^32))``.

    Args:
        k_prime: The recovered first-block expanded key.

    Returns:
        The 16-octet master key.

    Raises:
        InversionSanityError: If the 32 padding bits are not all zero.
    """
    base = apply(inverse_phi2_matrix(), k_prime)
    padded = permute_inv(base)
    if padded[8 * KEY_OCTETS :].any():
        raise InversionSanityError("inversion sanity failed: padding bits of P^-1(phi2^-1(K')) are not zero")
    return state_to_bytes(padded)[:KEY_OCTETS]


def derive_sub_seed(seed: int, trial_index: int) -> int:
    return (seed ^ trial_index) & SEED_MASK


@dataclass(frozen=True)
class TrialResult:
    trial_index: int
    sub_seed: int
    success: bool
    queries_used: int
    recovered_key: bytes | None
    survivors: tuple[int, ...]
    error: str | None = None

    @property
    def survivors_max(self) -> int:
        return max(self.survivors)


def _draw_block1(rng: np.random.Generator, attacker_model: AttackerModel) -> bytes:
    match attacker_model:
        case "kpa":
            return rng.integers(0, 256, size=STATE_OCTETS, dtype=np.uint8).tobytes()
        case "cpa":
            return bytes(STATE_OCTETS)
    raise AssertionError(attacker_model)


def _verify_key(candidate: bytes, key: bytes, nonce: bytes, m1: bytes) -> bool:
    return encrypt(candidate, nonce, b"", m1) == encrypt(key, nonce, b"", m1)


def run_trial(cfg: AttackConfig, trial_index: int = 0) -> TrialResult:
    """Runs one simulated attack against a fresh random key.

    Args:
        cfg: The attack configuration.
        trial_index: The trial number, mixed into the seed.

    Returns:
        The outcome of the trial.
    """
    sub_seed = derive_sub_seed(cfg.seed, trial_index)
    rng = np.random.default_rng(sub_seed)
    key = rng.integers(0, 256, size=KEY_OCTETS, dtype=np.uint8).tobytes()
    m1 = _draw_block1(rng, cast_attacker_model(cfg.attacker_model))
    nonces = rng.integers(0, 256, size=(cfg.max_queries, DUMBO.nonce_octets), dtype=np.uint8)

    fault_map = cfg.fault_map
    table, final_table = ciphertext_path_tables(fault_map, cfg.fault_scope)
    missing = (table if final_table is None else final_table).missing
    candidates = NibbleCandidates.full()

    def result(success: bool, queries: int, recovered: bytes | None = None, error: str | None = None) -> TrialResult:
        survivors = tuple(int(c) for c in candidates.counts())
        return TrialResult(trial_index, sub_seed, success, queries, recovered, survivors, error)

    if not missing:
        logger.debug("Trial %d: %s leaves the Sbox bijective; nothing to eliminate", trial_index, fault_map)
        return result(False, cfg.max_queries)

    i1 = faulty_encrypt_block1(key, nonces, m1, fault_map, cfg.fault_scope) ^ state_from_octets(m1)
    true_kappas = expanded_key_nibbles(expanded_key(key)) if cfg.check_soundness else None

    queries_used = cfg.max_queries
    try:
        for q in range(cfg.max_queries):
            candidates = eliminate(candidates, i1[q], missing)
            if true_kappas is not None and not candidates.contains(true_kappas):
                raise ModelInconsistencyError(f"query {q + 1} eliminated a true key guess")
            if logger.isEnabledFor(logging.DEBUG):
                logger.debug("Trial %d query %d: %d candidates left", trial_index, q + 1, candidates.counts().sum())
            if candidates.converged:
                queries_used = q + 1
                break
    except ModelInconsistencyError as e:
        logger.error("Trial %d aborted: %s", trial_index, e)
        return result(False, cfg.max_queries, error=str(e))

    if not candidates.converged:
        return result(False, queries_used)

    try:
        recovered = recover_master_key(recover_expanded_key(candidates))
    except InversionSanityError as e:
        logger.warning("Trial %d: %s", trial_index, e)
        return result(False, queries_used, error=str(e))

    nonce = nonces[0].tobytes()
    success = recovered == key and _verify_key(recovered, key, nonce, m1)
    return result(success, queries_used, recovered=recovered)


def survivor_profile(survivors: tuple[int, ...] | np.ndarray) -> str:
    """Formats per-nibble survivor counts as ``count x nibbles`` groups."""
    values, counts = np.unique(np.asarray(survivors), return_counts=True)
    return ", ".join(f"{int(n)} nibble(s) with {int(v)}" for v, n in zip(values, counts))

