"""Defines a gate-level model of the Spongent Sbox with SET fault injection.

The circuit is a flat list of single-output gates; wire ``w<i>`` is the output
of gate ``i``. The first four wires are the primary inputs ``X0 .. X3``
(``X0`` is the nibble MSB) and four designated wires carry ``Y0 .. Y3``
(``Y0`` is the MSB).

A single-event transient is modelled as a stuck-at override: right after a
faulted wire is computed its value is forced to 0 (SET0) or 1 (SET1), so every
consumer of the wire sees the forced value.

Simulation is bit-parallel. Each wire carries an integer whose bit ``x`` is the
wire's value for input nibble ``x``, so the whole truth table comes out of a
single pass over the gates.
"""

import functools
import hashlib
import logging
import re
from dataclasses import dataclass
from typing import Iterable, Literal, Mapping, cast, get_args

from setfalab.cipher.sbox import SPONGENT_SBOX, SboxTable

logger = logging.getLogger(__name__)

GateOp = Literal["INPUT", "NOT", "AND", "OR", "XOR", "XNOR"]
Polarity = Literal[0, 1]

GATE_ARITY: dict[GateOp, int] = {"INPUT": 0, "NOT": 1, "AND": 2, "OR": 2, "XOR": 2, "XNOR": 2}

NUM_INPUTS = 4
NUM_OUTPUTS = 4

_FAULT_TERM_RE = re.compile(r"^w(\d+)=([01])$")
_ALL_INPUTS_MASK = 0xFFFF


class FaultMapError(ValueError):
    """Raised for malformed fault specifications."""


def cast_gate_op(s: str) -> GateOp:
    args = get_args(GateOp)
    assert s in args, f"Invalid gate op {s}; must be one of {args}"
    return cast(GateOp, s)


@dataclass(frozen=True)
class Gate:
    id: int
    op: GateOp
    inputs: tuple[int, ...] = ()
    name: str | None = None

    def __post_init__(self) -> None:
        cast_gate_op(self.op)
        if len(self.inputs) != GATE_ARITY[self.op]:
            raise ValueError(f"{self.op} gate w{self.id} takes {GATE_ARITY[self.op]} inputs, got {self.inputs}")
        if any(i >= self.id or i < 0 for i in self.inputs):
            raise ValueError(f"Gate w{self.id} reads {self.inputs}; inputs must be earlier wires")

    def render(self) -> str:
        args = self.name if self.op == "INPUT" else ", ".join(f"w{i}" for i in self.inputs)
        return f"w{self.id} = {self.op}({args})"


@dataclass(frozen=True)
class Netlist:
    """An acyclic single-output-per-gate circuit, stored in topological order.

    Parameters:
        gates: The gates, where gate ``i`` drives wire ``w<i>``.
        outputs: The wires carrying ``Y0 .. Y3``.
    """

    gates: tuple[Gate, ...]
    outputs: tuple[int, ...]

    def __post_init__(self) -> None:
        for i, gate in enumerate(self.gates):
            if gate.id != i:
                raise ValueError(f"Gate at position {i} is labelled w{gate.id}")
            if (i < NUM_INPUTS) != (gate.op == "INPUT"):
                raise ValueError(f"The first {NUM_INPUTS} wires, and only those, must be inputs; got {gate.render()}")
        if len(self.outputs) != NUM_OUTPUTS:
            raise ValueError(f"Expected {NUM_OUTPUTS} outputs, got {self.outputs}")
        if any(not NUM_INPUTS <= o < self.num_wires for o in self.outputs):
            raise ValueError(f"Output wires {self.outputs} must be gate wires")

    @property
    def num_wires(self) -> int:
        return len(self.gates)

    @property
    def wire_ids(self) -> range:
        return range(self.num_wires)

    def dump(self) -> str:
        lines = [gate.render() for gate in self.gates]
        lines += [f"output Y{i} = w{o}" for i, o in enumerate(self.outputs)]
        return "\n".join(lines) + "\n"

    def fingerprint(self) -> str:
        """SHA-256 of the textual dump, identifying the fault-point universe."""
        return hashlib.sha256(self.dump().encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class FaultMap:
    """A set of SET faults, as sorted ``(wire, polarity)`` pairs.

    Parameters:
        assignments: One entry per faulted wire.
    """

    assignments: tuple[tuple[int, int], ...] = ()

    def __post_init__(self) -> None:
        pairs = tuple(sorted((int(w), int(p)) for w, p in self.assignments))
        wires = [w for w, _ in pairs]
        if len(set(wires)) != len(wires):
            raise FaultMapError(f"A wire can carry at most one fault, got {self.assignments}")
        if any(p not in (0, 1) for _, p in pairs):
            raise FaultMapError(f"Fault polarities must be 0 or 1, got {self.assignments}")
        if any(w < 0 for w in wires):
            raise FaultMapError(f"Wire ids must be non-negative, got {self.assignments}")
        object.__setattr__(self, "assignments", pairs)

    @classmethod
    def of(cls, faults: Mapping[int, int] | Iterable[tuple[int, int]]) -> "FaultMap":
        items = faults.items() if isinstance(faults, Mapping) else faults
        return cls(tuple(items))

    @classmethod
    def from_spec(cls, spec: str, netlist: Netlist | None = None) -> "FaultMap":
        """Parses the ``w12=0,w30=1`` syntax.

        Args:
            spec: Comma-separated ``w<id>=<polarity>`` terms; an empty string
                (or ``none``) is the fault-free map.
            netlist: If given, wire ids are checked against it.

        Returns:
            The parsed fault map.

        Raises:
            FaultMapError: If a term is malformed, a wire is assigned twice,
                or a wire does not exist in ``netlist``.
        """
        spec = spec.strip()
        pairs: list[tuple[int, int]] = []
        if spec and spec.lower() != "none":
            for term in spec.split(","):
                if (m := _FAULT_TERM_RE.match(term.strip())) is None:
                    raise FaultMapError(f"Malformed fault term {term!r}; expected w<id>=0 or w<id>=1")
                pairs.append((int(m.group(1)), int(m.group(2))))
        faults = cls(tuple(pairs))
        if netlist is not None:
            faults.validate(netlist)
        return faults

    def to_spec(self) -> str:
        return ",".join(f"w{w}={p}" for w, p in self.assignments)

    def validate(self, netlist: Netlist) -> "FaultMap":
        unknown = [w for w in self.wires if w >= netlist.num_wires]
        if unknown:
            raise FaultMapError(f"Unknown wire ids {unknown}; the netlist has wires w0..w{netlist.num_wires - 1}")
        return self

    @property
    def wires(self) -> tuple[int, ...]:
        return tuple(w for w, _ in self.assignments)

    @property
    def polarities(self) -> tuple[int, ...]:
        return tuple(p for _, p in self.assignments)

    @property
    def order(self) -> int:
        return len(self.assignments)

    def as_dict(self) -> dict[int, int]:
        return dict(self.assignments)

    def __str__(self) -> str:
        return self.to_spec() or "none"


NO_FAULTS = FaultMap()


def _build_canonical() -> Netlist:
    gates: list[Gate] = [Gate(i, "INPUT", name=f"X{i}") for i in range(NUM_INPUTS)]
    names: dict[int, str] = {}

    def add(op: GateOp, *inputs: int, name: str | None = None) -> int:
        gates.append(Gate(len(gates), op, tuple(inputs), name))
        return len(gates) - 1

    x0, x1, x2, x3 = range(NUM_INPUTS)

    # Y0 = ~((X0 ^ X1) | X2) | ~(X1 | (X2 xnor X3)) | ~(~(~X0 & X1) | ~(X2 & X3))
    a = add("NOT", add("OR", add("XOR", x0, x1), x2))
    b = add("NOT", add("OR", x1, add("XNOR", x2, x3)))
    c = add("NOT", add("OR", add("NOT", add("AND", add("NOT", x0), x1)), add("NOT", add("AND", x2, x3))))
    y0 = add("OR", add("OR", a, b), c)

    # Y1 = ~(X0 | (X1 ^ X2)) | ~(X1 | X2 | X3) | ~(~(X0 & X3) | ~(X1 | X2))
    a = add("NOT", add("OR", x0, add("XOR", x1, x2)))
    b = add("NOT", add("OR", x1, add("OR", x2, x3)))
    c = add("NOT", add("OR", add("NOT", add("AND", x0, x3)), add("NOT", add("OR", x1, x2))))
    y1 = add("OR", add("OR", a, b), c)

    # Y2 = X0 & (X1 xnor X2) | X1 & X2 & X3 | ~(X0 | X3) & ~(X1 & X2)
    a = add("AND", x0, add("XNOR", x1, x2))
    b = add("AND", x1, add("AND", x2, x3))
    c = add("AND", add("NOT", add("OR", x0, x3)), add("NOT", add("AND", x1, x2)))
    y2 = add("OR", add("OR", a, b), c)

    # Y3 = ~((X0 xnor X3) ^ (~X1 & X2)), with the XOR spelled as ~(~a | b) | (~a & b).
    not_a = add("NOT", add("XNOR", x0, x3))
    b = add("AND", add("NOT", x1), x2)
    term1 = add("NOT", add("OR", not_a, b))
    term2 = add("AND", not_a, b)
    y3 = add("NOT", add("OR", term1, term2))

    for i, wire in enumerate((y0, y1, y2, y3)):
        names[wire] = f"Y{i}"
    named = [Gate(g.id, g.op, g.inputs, names.get(g.id, g.name)) for g in gates]
    return Netlist(tuple(named), (y0, y1, y2, y3))


@functools.lru_cache(maxsize=None)
def canonical_netlist() -> Netlist:
    """Returns the fixed 53-wire decomposition of the Spongent Sbox.

    Wires are numbered inputs first, then the gates of ``Y0``, ``Y1``, ``Y2``
    and ``Y3`` in turn. Subexpressions are shared only inside ``Y3``.

    Returns:
        The canonical netlist.
    """
    netlist = _build_canonical()
    table = faulty_truth_table(netlist, NO_FAULTS)
    assert table == SPONGENT_SBOX, f"Canonical netlist computes {table.to_hex()}, not {SPONGENT_SBOX.to_hex()}"
    return netlist


def _simulate(netlist: Netlist, input_values: tuple[int, ...], faults: FaultMap, ones: int) -> list[int]:
    fault_of = faults.as_dict()
    values: list[int] = []
    for gate in netlist.gates:
        ins = [values[i] for i in gate.inputs]
        match gate.op:
            case "INPUT":
                v = input_values[gate.id]
            case "NOT":
                v = ~ins[0] & ones
            case "AND":
                v = ins[0] & ins[1]
            case "OR":
                v = ins[0] | ins[1]
            case "XOR":
                v = ins[0] ^ ins[1]
            case "XNOR":
                v = ~(ins[0] ^ ins[1]) & ones
            case _:
                raise ValueError(f"Unsupported gate op {gate.op}")
        if (forced := fault_of.get(gate.id)) is not None:
            v = ones if forced else 0
        values.append(v)
    return values


def evaluate(netlist: Netlist, x: int, faults: FaultMap = NO_FAULTS) -> int:
    """Evaluates the circuit on one input nibble.

    Args:
        netlist: The circuit.
        x: The input nibble, with ``X0`` as its MSB.
        faults: The SET faults to apply.

    Returns:
        The output nibble ``Y0 Y1 Y2 Y3`` (``Y0`` is the MSB).

    Raises:
        ValueError: If ``x`` is not a nibble.
    """
    if not 0 <= x <= 15:
        raise ValueError(f"Sbox input must be a nibble, got {x}")
    faults.validate(netlist)
    inputs = tuple((x >> (NUM_INPUTS - 1 - k)) & 1 for k in range(NUM_INPUTS))
    values = _simulate(netlist, inputs, faults, ones=1)
    return sum(values[o] << (NUM_OUTPUTS - 1 - i) for i, o in enumerate(netlist.outputs))


@functools.lru_cache(maxsize=None)
def _input_masks() -> tuple[int, ...]:
    return tuple(
        sum(1 << x for x in range(16) if (x >> (NUM_INPUTS - 1 - k)) & 1)
        for k in range(NUM_INPUTS)
    )


def faulty_truth_table(netlist: Netlist, faults: FaultMap = NO_FAULTS) -> SboxTable:
    """Computes the Sbox table realised by the circuit under ``faults``.

    Args:
        netlist: The circuit.
        faults: The SET faults to apply.

    Returns:
        The 16-entry table; ``table[x]`` equals ``evaluate(netlist, x, faults)``.
    """
    faults.validate(netlist)
    values = _simulate(netlist, _input_masks(), faults, ones=_ALL_INPUTS_MASK)
    outs = [values[o] for o in netlist.outputs]
    entries = tuple(
        sum(((outs[i] >> x) & 1) << (NUM_OUTPUTS - 1 - i) for i in range(NUM_OUTPUTS))
        for x in range(16)
    )
    return SboxTable(entries)


def missing_values(table: SboxTable) -> frozenset[int]:
    return table.missing
