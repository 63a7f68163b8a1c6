"""Tests the hot-spot fault search."""

import csv
from pathlib import Path

import pytest

import setfalab
from setfalab.attack.hotspots import HOTSPOTS_CSV_HEADER, count_fault_maps, iter_fault_maps


@pytest.fixture(scope="module")
def order2_records() -> list[setfalab.HotspotRecord]:
    return setfalab.enumerate_hotspots(setfalab.canonical_netlist(), 2)


@pytest.mark.parametrize(
    "missing, expected",
    [
        ({5}, {0}),
        ({2, 7}, {0, 5}),
        ({1, 2, 4}, {0}),
        ({0, 1, 2, 3}, {0, 1, 2, 3}),
        ({7, 0xF}, {0, 8}),
        (set(), set(range(16))),
    ],
)
def test_stabilizer(missing: set[int], expected: set[int]) -> None:
    assert setfalab.stabilizer(missing) == frozenset(expected)


def test_counts(order2_records: list[setfalab.HotspotRecord]) -> None:
    assert count_fault_maps(53, 1) == 106
    assert count_fault_maps(53, 2) == 5618
    assert count_fault_maps(53, 3) == 5618 + 23426 * 8
    assert len(setfalab.enumerate_hotspots(setfalab.canonical_netlist(), 1)) == 106
    assert len(order2_records) == 5618


def test_enumeration_order(order2_records: list[setfalab.HotspotRecord]) -> None:
    assert order2_records[0].fault_map.to_spec() == "w0=0"
    assert order2_records[1].fault_map.to_spec() == "w0=1"
    assert order2_records[105].fault_map.to_spec() == "w52=1"
    assert order2_records[106].fault_map.to_spec() == "w0=0,w1=0"
    assert order2_records[109].fault_map.to_spec() == "w0=1,w1=1"
    maps = list(iter_fault_maps(setfalab.canonical_netlist(), 2))
    assert [r.fault_map for r in order2_records] == maps


def test_record_invariants(order2_records: list[setfalab.HotspotRecord]) -> None:
    for record in order2_records:
        assert record.survivors_per_nibble == len(setfalab.stabilizer(record.missing))
        if record.missing_count % 2 == 1:
            assert record.survivors_per_nibble == 1
        if not record.usable:
            assert record.survivors_per_nibble == 16
            assert record.residual_keyspace_log2 == 160.0


def test_behaviour_classes(order2_records: list[setfalab.HotspotRecord]) -> None:
    summary = setfalab.summarize_hotspots(order2_records)
    assert summary.total == 5618
    assert summary.usable + summary.unusable == 5618
    assert summary.single_one_missing is not None
    assert summary.pair_two_missing is not None
    assert not summary.deviates
    assert sum(summary.by_missing_count.values()) == 5618
    assert len(summary.lines()) == 5


def test_classify() -> None:
    netlist = setfalab.canonical_netlist()
    record = setfalab.classify_fault_map(netlist, setfalab.FaultMap.from_spec("w24=0,w36=0"))
    assert record.missing == frozenset({0x7, 0xF})
    assert record.missing_values_hex == "7f"
    assert record.survivors_per_nibble == 2
    assert record.residual_keyspace_log2 == 40.0

    record = setfalab.classify_fault_map(netlist, setfalab.FaultMap.from_spec("w16=0"))
    assert record.missing_count == 1
    assert record.survivors_per_nibble == 1
    assert record.residual_keyspace_log2 == 0.0


def test_select_min_residual(order2_records: list[setfalab.HotspotRecord]) -> None:
    record = setfalab.select_fault_combination(order2_records, "min_residual")
    assert record.missing_count == 1
    assert record.survivors_per_nibble == 1
    assert record.fault_map.order == 1


def test_select_min_missing_nonzero(order2_records: list[setfalab.HotspotRecord]) -> None:
    record = setfalab.select_fault_combination(order2_records, "min_missing_nonzero")
    assert record.missing_count == 1
    assert record.fault_map.order == 1


def test_select_explicit() -> None:
    netlist = setfalab.canonical_netlist()
    record = setfalab.classify_fault_map(netlist, setfalab.FaultMap.from_spec("w52=0"))
    assert setfalab.select_fault_combination([], "explicit", record) is record
    assert record.missing_count == 8

    with pytest.raises(ValueError):
        setfalab.select_fault_combination([], "explicit")
    with pytest.raises(setfalab.NoUsableHotspotError):
        setfalab.select_fault_combination([], "explicit", setfalab.classify_fault_map(netlist, setfalab.FaultMap()))


def test_select_without_usable_records() -> None:
    netlist = setfalab.canonical_netlist()
    records = [setfalab.classify_fault_map(netlist, setfalab.FaultMap())]
    with pytest.raises(setfalab.NoUsableHotspotError):
        setfalab.select_fault_combination(records, "min_residual")
    with pytest.raises(ValueError):
        setfalab.select_fault_combination([], "min_residual")

    two_missing = [setfalab.classify_fault_map(netlist, setfalab.FaultMap.from_spec("w24=0,w36=0"))]
    assert setfalab.select_fault_combination(two_missing, "min_missing_nonzero") == two_missing[0]
    with pytest.raises(setfalab.NoUsableHotspotError):
        setfalab.select_fault_combination(two_missing, "min_residual")


@pytest.mark.parametrize("max_order", [0, 4])
def test_bad_order(max_order: int) -> None:
    with pytest.raises(ValueError):
        setfalab.enumerate_hotspots(setfalab.canonical_netlist(), max_order)
    with pytest.raises(ValueError):
        setfalab.HotspotConfig(max_order=max_order)


def test_bad_policy() -> None:
    with pytest.raises(ValueError):
        setfalab.HotspotConfig(policy="best")


def test_parallel_matches_serial() -> None:
    netlist = setfalab.canonical_netlist()
    serial = setfalab.enumerate_hotspots(netlist, 1)
    parallel = setfalab.enumerate_hotspots(netlist, 1, num_workers=2, chunk_size=7)
    assert parallel == serial


def test_csv(tmp_path: Path, order2_records: list[setfalab.HotspotRecord]) -> None:
    parallel = setfalab.enumerate_hotspots(setfalab.canonical_netlist(), 2, num_workers=2)
    first = setfalab.write_hotspots_csv(order2_records, tmp_path / "a.csv")
    second = setfalab.write_hotspots_csv(parallel, tmp_path / "b.csv")
    assert first.read_bytes() == second.read_bytes()

    with open(first, newline="", encoding="utf-8") as f:
        rows = list(csv.reader(f))
    assert tuple(rows[0]) == HOTSPOTS_CSV_HEADER
    assert len(rows) == 5618 + 1

    record = order2_records[106]
    assert rows[107][:3] == ["106", "w0;w1", "0;0"]
    assert rows[107][3:] == [
        str(record.missing_count),
        record.missing_values_hex,
        str(record.survivors_per_nibble),
        f"{record.residual_keyspace_log2:.1f}",
        str(int(record.usable)),
    ]


@pytest.mark.slow
@pytest.mark.timeout(1200)
def test_order3_enumeration() -> None:
    records = setfalab.enumerate_hotspots(setfalab.canonical_netlist(), 3, num_workers=2)
    assert len(records) == 193_026
    assert records[5618].fault_map.to_spec() == "w0=0,w1=0,w2=0"
    summary = setfalab.summarize_hotspots(records)
    assert not summary.deviates
