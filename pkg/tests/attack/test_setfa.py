"""Tests the SET fault key-recovery attack."""

import numpy as np
import pytest

import setfalab
from setfalab.attack.setfa import expanded_key_nibbles, observed_nibbles, survivor_profile
from setfalab.cipher.masking import expand_key, expanded_key
from setfalab.core.state import random_states, state_to_bytes, zero_state

ONE_MISSING = setfalab.FaultMap.from_spec("w16=0")
TWO_MISSING = setfalab.FaultMap.from_spec("w24=0,w36=0")


def random_nonces(rng: np.random.Generator, n: int) -> np.ndarray:
    return rng.integers(0, 256, size=(n, 12), dtype=np.uint8)


def test_fault_free_block_matches_encrypt(rng: np.random.Generator) -> None:
    key, nonce, m1 = rng.bytes(16), rng.bytes(12), rng.bytes(20)
    c1 = setfalab.faulty_encrypt_block1(key, nonce, m1, setfalab.FaultMap())
    assert state_to_bytes(c1) == setfalab.encrypt(key, nonce, b"", m1)[0]


def test_fault_free_batch_matches_encrypt(rng: np.random.Generator) -> None:
    key, m1 = rng.bytes(16), rng.bytes(20)
    nonces = random_nonces(rng, 5)
    c1 = setfalab.faulty_encrypt_block1(key, nonces, m1, setfalab.FaultMap())
    for row, nonce in zip(c1, nonces):
        assert state_to_bytes(row) == setfalab.encrypt(key, nonce.tobytes(), b"", m1)[0]


@pytest.mark.parametrize("scope", ["all", "last"])
def test_faulty_outputs_avoid_missing_values(rng: np.random.Generator, scope: str) -> None:
    key, m1 = rng.bytes(16), rng.bytes(20)
    c1 = setfalab.faulty_encrypt_block1(key, random_nonces(rng, 100), m1, ONE_MISSING, scope)  # type: ignore[arg-type]
    i1 = c1 ^ setfalab.state_from_octets(m1)
    sbox_out = observed_nibbles(i1) ^ expanded_key_nibbles(expanded_key(key))
    assert sbox_out.shape == (100, 40)
    assert not (sbox_out == 0xF).any()
    assert len({row.tobytes() for row in np.packbits(c1, axis=-1)}) == 100


def test_extract_candidate_nibble(rng: np.random.Generator) -> None:
    i1 = random_states(rng)
    obs = observed_nibbles(i1)
    for s in (0, 17, 39):
        for kappa in (0, 5, 15):
            assert setfalab.extract_candidate_nibble(i1, s, kappa) == obs[s] ^ kappa
    assert setfalab.extract_candidate_nibble(zero_state(), 3, 0) == 0
    with pytest.raises(ValueError):
        setfalab.extract_candidate_nibble(i1, 40, 0)
    with pytest.raises(ValueError):
        setfalab.extract_candidate_nibble(i1, 0, 16)


def test_eliminate_one_query(rng: np.random.Generator) -> None:
    candidates = setfalab.eliminate(setfalab.NibbleCandidates.full(), random_states(rng), {0xF})
    assert (candidates.counts() == 15).all()

    batch = setfalab.eliminate(setfalab.NibbleCandidates.full(), random_states(rng, 3), {0xF})
    assert (batch.counts() >= 13).all()

    with pytest.raises(ValueError):
        setfalab.eliminate(setfalab.NibbleCandidates.full(), random_states(rng), set())


def test_eliminate_keeps_true_guess(rng: np.random.Generator) -> None:
    key, m1 = rng.bytes(16), rng.bytes(20)
    k_prime = expanded_key(key)
    i1 = setfalab.faulty_encrypt_block1(key, random_nonces(rng, 600), m1, ONE_MISSING) ^ setfalab.state_from_octets(m1)
    candidates = setfalab.eliminate(setfalab.NibbleCandidates.full(), i1, {0xF})
    assert candidates.contains(expanded_key_nibbles(k_prime))
    assert candidates.converged
    assert (setfalab.recover_expanded_key(candidates) == k_prime).all()


def test_model_inconsistency(rng: np.random.Generator) -> None:
    k_prime = random_states(rng)
    candidates = setfalab.NibbleCandidates.from_expanded_key(k_prime)
    i1 = random_states(rng)
    true_out = observed_nibbles(i1) ^ expanded_key_nibbles(k_prime)
    with pytest.raises(setfalab.ModelInconsistencyError):
        setfalab.eliminate(candidates, i1, {int(true_out[0])})


def test_recover_expanded_key(rng: np.random.Generator) -> None:
    k_prime = random_states(rng)
    candidates = setfalab.NibbleCandidates.from_expanded_key(k_prime)
    assert candidates.converged
    assert (setfalab.recover_expanded_key(candidates) == k_prime).all()

    ambiguous = setfalab.NibbleCandidates.from_expanded_key(k_prime, frozenset({0, 8}))
    assert (ambiguous.counts() == 2).all()
    assert ambiguous.survivors(0) == {int(expanded_key_nibbles(k_prime)[0]), int(expanded_key_nibbles(k_prime)[0]) ^ 8}
    with pytest.raises(setfalab.NotConvergedError, match="not converged") as exc_info:
        setfalab.recover_expanded_key(ambiguous)
    assert (exc_info.value.survivors == 2).all()


def test_recover_master_key(rng: np.random.Generator) -> None:
    zero_k_prime = setfalab.phi2(setfalab.permute(zero_state()))
    assert setfalab.recover_master_key(zero_k_prime) == bytes(16)
    for _ in range(100):
        key = rng.bytes(16)
        assert setfalab.recover_master_key(expanded_key(key)) == key
    assert (expanded_key(bytes(16)) == zero_k_prime).all()
    assert (expand_key(bytes(16)) == 0).all()


def test_inversion_sanity(rng: np.random.Generator) -> None:
    k_prime = expanded_key(rng.bytes(16))
    for bit in rng.choice(160, size=20, replace=False):
        flipped = k_prime.copy()
        flipped[bit] ^= 1
        with pytest.raises(setfalab.InversionSanityError, match="inversion sanity failed"):
            setfalab.recover_master_key(flipped)


def test_run_trial_recovers_key() -> None:
    cfg = setfalab.AttackConfig(fault="w16=0", max_queries=250, seed=7)
    results = [setfalab.run_trial(cfg, i) for i in range(5)]
    assert sum(r.success for r in results) >= 4
    for r in results:
        assert r.error is None
        if r.success:
            assert r.survivors == (1,) * 40
            assert r.recovered_key is not None
            assert 1 <= r.queries_used <= 250


def test_run_trial_is_deterministic() -> None:
    cfg = setfalab.AttackConfig(fault="w16=0", max_queries=300, seed=11)
    first, second = setfalab.run_trial(cfg, 3), setfalab.run_trial(cfg, 3)
    assert first == second
    assert first.sub_seed == 11 ^ 3


def test_two_missing_values_leave_two_survivors() -> None:
    cfg = setfalab.AttackConfig(fault=TWO_MISSING.to_spec(), max_queries=500, seed=3)
    result = setfalab.run_trial(cfg)
    assert not result.success
    assert result.error is None
    assert result.survivors == (2,) * 40
    assert result.queries_used == 500
    assert survivor_profile(result.survivors) == "40 nibble(s) with 2"


def test_control_run() -> None:
    result = setfalab.run_trial(setfalab.AttackConfig(fault="", max_queries=50))
    assert not result.success
    assert result.recovered_key is None
    assert result.survivors == (16,) * 40
    assert result.queries_used == 50
    assert result.survivors_max == 16


@pytest.mark.parametrize("scope, model", [("last", "kpa"), ("all", "cpa"), ("last", "cpa")])
def test_run_trial_variants(scope: str, model: str) -> None:
    cfg = setfalab.AttackConfig(fault="w16=0", scope=scope, attacker_model=model, max_queries=500, seed=5)
    result = setfalab.run_trial(cfg)
    assert result.error is None
    assert result.success
    assert result.survivors_max == 1


def test_no_soundness_check() -> None:
    cfg = setfalab.AttackConfig(fault="w36=0", max_queries=500, check_soundness=False)
    assert setfalab.run_trial(cfg).success


@pytest.mark.parametrize(
    "kwargs",
    [{"max_queries": 0}, {"scope": "first"}, {"attacker_model": "cca"}, {"fault": "w99=0"}, {"fault": "w1=2"}],
)
def test_config_validation(kwargs: dict) -> None:
    with pytest.raises(ValueError):
        setfalab.AttackConfig(**kwargs)


def test_survivor_profile() -> None:
    assert survivor_profile((1,) * 38 + (2, 2)) == "38 nibble(s) with 1, 2 nibble(s) with 2"


@pytest.mark.slow
@pytest.mark.timeout(1200)
def test_every_single_fault_with_one_missing_value() -> None:
    netlist = setfalab.canonical_netlist()
    records = setfalab.enumerate_hotspots(netlist, 1)
    one_missing = [r for r in records if r.missing_count == 1]
    assert one_missing
    for record in one_missing:
        cfg = setfalab.AttackConfig(fault=record.fault_map.to_spec(), max_queries=600, seed=99)
        result = setfalab.run_trial(cfg)
        assert result.error is None, record.fault_map
        assert result.success, record.fault_map


@pytest.mark.slow
@pytest.mark.timeout(1200)
def test_two_missing_values_over_many_trials() -> None:
    cfg = setfalab.AttackConfig(fault=TWO_MISSING.to_spec(), max_queries=500, seed=1337)
    report = setfalab.campaign(cfg, 50, num_workers=2)
    for result in report.trials:
        assert result.error is None
        assert result.survivors == (2,) * 40
