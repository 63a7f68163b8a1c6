"""Defines the exhaustive search for hot-spot fault combinations.

Every combination of up to three SET faults on the Sbox netlist is simulated
and classified by the values that no longer occur at the Sbox output. The
elimination attack can never separate two key guesses whose difference
``delta`` maps the missing set onto itself, so the number of guesses that
survive per nibble is the size of that XOR stabilizer, and the residual key
space over the 40 nibbles is ``survivors ** 40``.
"""

import csv
import functools
import itertools
import logging
import math
import multiprocessing as mp
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Iterator, Literal, Sequence, cast, get_args

from setfalab.circuit.netlist import FaultMap, Netlist, faulty_truth_table, missing_values
from setfalab.core.conf import field

logger = logging.getLogger(__name__)

SelectionPolicy = Literal["min_missing_nonzero", "min_residual", "explicit"]

MAX_ORDER = 3

HOTSPOTS_CSV_HEADER = (
    "combo_id",
    "wires",
    "polarities",
    "missing_count",
    "missing_values_hex",
    "survivors_per_nibble",
    "residual_keyspace_log2",
    "usable",
)


class NoUsableHotspotError(RuntimeError):
    """Raised when no fault combination removes any Sbox output value."""


def cast_selection_policy(s: str) -> SelectionPolicy:
    args = get_args(SelectionPolicy)
    assert s in args, f"Invalid selection policy {s}; must be one of {args}"
    return cast(SelectionPolicy, s)


@dataclass
class HotspotConfig:
    max_order: int = field(2, help="The largest number of simultaneously faulted wires (1 to 3)")
    policy: str = field("min_residual", help="How to pick the attack fault from the enumeration")

    def __post_init__(self) -> None:
        if not 1 <= self.max_order <= MAX_ORDER:
            raise ValueError(f"max_order must be between 1 and {MAX_ORDER}, got {self.max_order}")
        if self.policy not in get_args(SelectionPolicy):
            raise ValueError(f"Invalid selection policy {self.policy}; must be one of {get_args(SelectionPolicy)}")


def stabilizer(missing: Iterable[int]) -> frozenset[int]:
    """Returns the offsets ``delta`` with ``{m ^ delta : m in missing} == missing``.

    Args:
        missing: A set of nibbles.

    Returns:
        The stabilizer, which always contains 0 and has a power-of-two size.
    """
    missing_set = frozenset(missing)
    return frozenset(d for d in range(16) if frozenset(m ^ d for m in missing_set) == missing_set)


@dataclass(frozen=True)
class HotspotRecord:
    """The classification of one fault combination.

    Parameters:
        fault_map: The simulated faults.
        missing: The Sbox output values that never occur under the faults.
        survivors_per_nibble: Key guesses per nibble that elimination can
            never separate, i.e. the stabilizer size of ``missing``. This is
            16 for combinations that remove nothing.
    """

    fault_map: FaultMap
    missing: frozenset[int]
    survivors_per_nibble: int

    @property
    def missing_count(self) -> int:
        return len(self.missing)

    @property
    def usable(self) -> bool:
        return self.missing_count > 0

    @property
    def residual_keyspace_log2(self) -> float:
        return 40 * math.log2(self.survivors_per_nibble)

    @property
    def missing_values_hex(self) -> str:
        return "".join(f"{v:x}" for v in sorted(self.missing))

    def sort_key(self) -> tuple[int, tuple[int, ...], tuple[int, ...]]:
        return self.fault_map.order, self.fault_map.wires, self.fault_map.polarities


def classify_fault_map(netlist: Netlist, fault_map: FaultMap) -> HotspotRecord:
    missing = missing_values(faulty_truth_table(netlist, fault_map))
    return HotspotRecord(fault_map=fault_map, missing=missing, survivors_per_nibble=len(stabilizer(missing)))


def iter_fault_maps(netlist: Netlist, max_order: int) -> Iterator[FaultMap]:
    """Yields every fault combination in enumeration order.

    Combinations are ordered by size, then lexicographically by wire ids, then
    by polarities.
    """
    for order in range(1, max_order + 1):
        for wires in itertools.combinations(netlist.wire_ids, order):
            for polarities in itertools.product((0, 1), repeat=order):
                yield FaultMap(tuple(zip(wires, polarities)))


def count_fault_maps(num_wires: int, max_order: int) -> int:
    return sum(math.comb(num_wires, k) * 2**k for k in range(1, max_order + 1))


def _classify_chunk(netlist: Netlist, chunk: list[FaultMap]) -> list[HotspotRecord]:
    return [classify_fault_map(netlist, fault_map) for fault_map in chunk]


def _chunks(fault_maps: Iterator[FaultMap], size: int) -> Iterator[list[FaultMap]]:
    while chunk := list(itertools.islice(fault_maps, size)):
        yield chunk


def enumerate_hotspots(
    netlist: Netlist,
    max_order: int,
    *,
    num_workers: int = 1,
    multiprocessing_context: str | None = None,
    chunk_size: int = 2048,
) -> list[HotspotRecord]:
    """Classifies every fault combination of up to ``max_order`` faults.

    Args:
        netlist: The Sbox circuit.
        max_order: The largest number of simultaneously faulted wires.
        num_workers: Worker processes to spread the simulation over.
        multiprocessing_context: The multiprocessing start method.
        chunk_size: Combinations per work item.

    Returns:
        One record per combination, in enumeration order regardless of the
        number of workers.

    Raises:
        ValueError: If ``max_order`` is not between 1 and 3.
    """
    if not 1 <= max_order <= MAX_ORDER:
        raise ValueError(f"max_order must be between 1 and {MAX_ORDER}, got {max_order}")

    total = count_fault_maps(netlist.num_wires, max_order)
    logger.info("Enumerating %d fault combinations over %d wires", total, netlist.num_wires)

    chunks = _chunks(iter_fault_maps(netlist, max_order), chunk_size)
    worker = functools.partial(_classify_chunk, netlist)
    records: list[HotspotRecord] = []
    if num_workers <= 1:
        for chunk in chunks:
            records.extend(worker(chunk))
    else:
        ctx = mp.get_context(multiprocessing_context)
        with ctx.Pool(num_workers) as pool:
            for chunk_records in pool.imap(worker, chunks):
                records.extend(chunk_records)

    assert len(records) == total, f"Expected {total} records, got {len(records)}"
    return records


def select_fault_combination(
    records: Sequence[HotspotRecord],
    policy: SelectionPolicy,
    explicit: HotspotRecord | None = None,
) -> HotspotRecord:
    """Picks the fault combination to attack with.

    Args:
        records: The enumerated combinations.
        policy: ``min_residual`` picks, among combinations leaving a single
            survivor per nibble, one with the fewest missing values;
            ``min_missing_nonzero`` picks one with the fewest missing values
            regardless of survivors; ``explicit`` returns ``explicit``. Ties
            go to fewer faults, then to the smallest wire ids.
        explicit: The record for the ``explicit`` policy; see
            :func:`classify_fault_map`.

    Returns:
        The selected record.

    Raises:
        ValueError: If ``records`` is empty, or ``explicit`` is missing for the
            explicit policy.
        NoUsableHotspotError: If no suitable record exists.
    """
    if policy == "explicit":
        if explicit is None:
            raise ValueError("The explicit policy needs a record")
        if not explicit.usable:
            raise NoUsableHotspotError(f"no usable hotspot: {explicit.fault_map} removes no Sbox output value")
        return explicit

    if not records:
        raise ValueError("Cannot select from an empty enumeration")
    usable = [r for r in records if r.usable]
    if policy == "min_residual":
        usable = [r for r in usable if r.survivors_per_nibble == 1]
    if not usable:
        raise NoUsableHotspotError(f"no usable hotspot among {len(records)} combinations for policy {policy}")
    return min(usable, key=lambda r: (r.missing_count, *r.sort_key()))


@dataclass(frozen=True)
class HotspotSummary:
    """Counts of fault combinations per behaviour class.

    Parameters:
        total: Number of combinations.
        usable: Combinations that remove at least one output value.
        by_missing_count: Number of combinations per missing-value count.
        single_one_missing: A single fault removing exactly one value.
        pair_two_missing: Two faults removing exactly two values, leaving two
            survivors per nibble.
        single_set1_three_missing: A single SET1 fault removing exactly three
            values.
    """

    total: int
    usable: int
    by_missing_count: dict[int, int]
    single_one_missing: HotspotRecord | None
    pair_two_missing: HotspotRecord | None
    single_set1_three_missing: HotspotRecord | None

    @property
    def unusable(self) -> int:
        return self.total - self.usable

    @property
    def deviates(self) -> bool:
        return self.single_one_missing is None or self.pair_two_missing is None

    def lines(self) -> list[str]:
        def example(record: HotspotRecord | None) -> str:
            return "absent" if record is None else f"present ({record.fault_map})"

        counts = ", ".join(f"{k} missing: {v}" for k, v in sorted(self.by_missing_count.items()))
        return [
            f"combinations: {self.total} (usable {self.usable}, unusable {self.unusable})",
            f"by missing count: {counts}",
            f"single fault, 1 missing value: {example(self.single_one_missing)}",
            f"two faults, 2 missing values, 2 survivors per nibble: {example(self.pair_two_missing)}",
            f"single SET1, 3 missing values: {example(self.single_set1_three_missing)}",
        ]


def summarize_hotspots(records: Sequence[HotspotRecord]) -> HotspotSummary:
    def first(pred: Callable[[HotspotRecord], bool]) -> HotspotRecord | None:
        return next((r for r in records if pred(r)), None)

    summary = HotspotSummary(
        total=len(records),
        usable=sum(r.usable for r in records),
        by_missing_count=dict(sorted(Counter(r.missing_count for r in records).items())),
        single_one_missing=first(lambda r: r.fault_map.order == 1 and r.missing_count == 1),
        pair_two_missing=first(
            lambda r: r.fault_map.order == 2 and r.missing_count == 2 and r.survivors_per_nibble == 2
        ),
        single_set1_three_missing=first(
            lambda r: r.fault_map.order == 1 and r.fault_map.polarities == (1,) and r.missing_count == 3
        ),
    )

    if (record := summary.single_set1_three_missing) is not None:
        logger.warning(
            "%s removes 3 values (%s); elimination leaves %d survivor(s) per nibble, not 3",
            record.fault_map,
            record.missing_values_hex,
            record.survivors_per_nibble,
        )
    else:
        logger.info("No single SET1 fault removes exactly 3 values")
    if summary.deviates:
        logger.warning("Netlist deviation: expected behaviour classes are missing; %s", "; ".join(summary.lines()))
    return summary


def write_hotspots_csv(records: Sequence[HotspotRecord], path: str | Path) -> Path:
    """Writes one row per record, in the given order.

    Args:
        records: The records to write.
        path: The output file.

    Returns:
        The path written to.
    """
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(HOTSPOTS_CSV_HEADER)
        for combo_id, record in enumerate(records):
            writer.writerow(
                [
                    combo_id,
                    ";".join(f"w{w}" for w in record.fault_map.wires),
                    ";".join(str(p) for p in record.fault_map.polarities),
                    record.missing_count,
                    record.missing_values_hex,
                    record.survivors_per_nibble,
                    f"{record.residual_keyspace_log2:.1f}",
                    int(record.usable),
                ]
            )
    return path
