"""Memristor-CMOS gate primitives and gate-level netlists.

Two primitives come from memristor-ratioed logic: a pair of memristors forms
a divider whose midpoint drives a CMOS inverter.  A node reaches its switching
threshold with time constant ``R * C_g``, ``R`` being the parallel
combination of the two memristors in their input-selected states.  A plain
CMOS inverter completes the library.

Netlists are built from these three kinds only and are evaluated
bit-parallel: every net carries a boolean numpy vector, one entry per input
vector in the batch.  Consecutive batch entries are treated as consecutive
clock steps for toggle counting.
"""

from __future__ import annotations

import graphlib
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

from .device import MemristorParams
from .errors import NetlistError

MR_NAND = "MR_NAND"
MR_NOR = "MR_NOR"
CMOS_INV = "CMOS_INV"
KINDS = (MR_NAND, MR_NOR, CMOS_INV)
ARITY = {MR_NAND: 2, MR_NOR: 2, CMOS_INV: 1}

LN2 = math.log(2.0)


@dataclass(frozen=True)
class GateModel:
    """Electrical figures for one gate kind.

    ``c_g`` is the gate capacitance of the output inverter, ``fixed_delay``
    the CMOS inverter's own contribution.  A plain inverter has no memristor
    pair, so its delay is ``fixed_delay`` alone.
    """

    kind: str
    c_g: float = 10e-15
    energy_per_toggle: float = 5e-15
    fixed_delay: float = 15e-12

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if self.c_g <= 0:
            raise ValueError("c_g must be positive")
        if self.energy_per_toggle < 0 or self.fixed_delay < 0:
            raise ValueError("energy_per_toggle and fixed_delay must be non-negative")


DEFAULT_MODELS = {
    MR_NAND: GateModel(MR_NAND, energy_per_toggle=6e-15, fixed_delay=15e-12),
    MR_NOR: GateModel(MR_NOR, energy_per_toggle=6e-15, fixed_delay=15e-12),
    CMOS_INV: GateModel(CMOS_INV, energy_per_toggle=3e-15, fixed_delay=15e-12),
}


@dataclass(frozen=True)
class GateEvalResult:
    output: int
    r_eq: float
    delay: float


def _logic(kind, ins):
    if kind == MR_NAND:
        return ~(ins[0] & ins[1])
    if kind == MR_NOR:
        return ~(ins[0] | ins[1])
    return ~ins[0]


def pair_resistance(kind: str, a, b, mr: MemristorParams):
    """Parallel resistance of the input memristor pair; works on scalars or arrays.

    NAND: a high input programs its memristor to ``r_on``.  NOR is the dual.
    """
    hi, lo = (mr.r_on, mr.r_off) if kind == MR_NAND else (mr.r_off, mr.r_on)
    r1 = np.where(a, hi, lo)
    r2 = np.where(b, hi, lo)
    return r1 * r2 / (r1 + r2)


def gate_delay(kind: str, ins, mr: MemristorParams, model: GateModel):
    if kind == CMOS_INV:
        return np.full(np.shape(ins[0]), model.fixed_delay, dtype=float)
    return LN2 * pair_resistance(kind, ins[0], ins[1], mr) * model.c_g + model.fixed_delay


def worst_case_delay(kind: str, mr: MemristorParams, model: GateModel) -> float:
    if kind == CMOS_INV:
        return model.fixed_delay
    combos = np.array([[0, 0, 1, 1], [0, 1, 0, 1]], dtype=bool)
    return float(np.max(gate_delay(kind, combos, mr, model)))


def eval_gate(kind: str, inputs: Sequence[int], mr_params: MemristorParams | None = None,
              model: GateModel | None = None) -> GateEvalResult:
    if kind not in KINDS:
        raise ValueError(f"unknown gate kind {kind!r}")
    if len(inputs) != ARITY[kind]:
        raise ValueError(f"{kind} takes {ARITY[kind]} input(s), got {len(inputs)}")
    mr = mr_params or MemristorParams()
    model = model or DEFAULT_MODELS[kind]
    ins = [bool(v) for v in inputs]
    out = int(_logic(kind, np.array(ins)))
    if kind == CMOS_INV:
        r_eq = 0.0
    else:
        r_eq = float(pair_resistance(kind, ins[0], ins[1], mr))
    return GateEvalResult(output=out, r_eq=r_eq, delay=float(gate_delay(kind, np.array(ins), mr, model)))


@dataclass(frozen=True)
class Gate:
    name: str
    kind: str
    inputs: tuple[str, ...]
    output: str


class Netlist:
    """Immutable acyclic gate graph.

    Gates are stored in a topological order fixed at construction.  Primary
    outputs may be driven by a gate or wired straight to a primary input.
    """

    def __init__(self, inputs: Iterable[str], outputs: Iterable[str], gates: Iterable[Gate]):
        self.inputs = tuple(inputs)
        self.outputs = tuple(outputs)
        gates = list(gates)
        if len(set(self.inputs)) != len(self.inputs):
            raise NetlistError("duplicate primary input")

        drivers: dict[str, Gate] = {}
        names = set()
        for g in gates:
            if g.kind not in KINDS:
                raise NetlistError(f"gate {g.name}: unknown kind {g.kind!r}")
            if len(g.inputs) != ARITY[g.kind]:
                raise NetlistError(f"gate {g.name}: {g.kind} takes {ARITY[g.kind]} input(s)")
            if g.name in names:
                raise NetlistError(f"duplicate gate id {g.name}")
            names.add(g.name)
            if g.output in drivers or g.output in self.inputs:
                raise NetlistError(f"net {g.output} has more than one driver")
            drivers[g.output] = g
        for g in gates:
            for net in g.inputs:
                if net not in drivers and net not in self.inputs:
                    raise NetlistError(f"gate {g.name}: input net {net} is undriven")
        for net in self.outputs:
            if net not in drivers and net not in self.inputs:
                raise NetlistError(f"primary output {net} is undriven")

        # keep construction order when it is already topological
        ready = set(self.inputs)
        for g in gates:
            if not ready.issuperset(g.inputs):
                break
            ready.add(g.output)
        else:
            self.gates = tuple(gates)
            return
        sorter = graphlib.TopologicalSorter()
        for g in gates:
            sorter.add(g.name, *(drivers[n].name for n in g.inputs if n in drivers))
        by_name = {g.name: g for g in gates}
        try:
            self.gates = tuple(by_name[n] for n in sorter.static_order())
        except graphlib.CycleError as exc:
            raise NetlistError(f"netlist is cyclic: {' -> '.join(exc.args[1])}") from None

    def __len__(self):
        return len(self.gates)

    def __repr__(self):
        return f"Netlist({len(self.inputs)} inputs, {len(self.outputs)} outputs, {len(self.gates)} gates)"

    @cached_property
    def nets(self) -> tuple[str, ...]:
        return self.inputs + tuple(g.output for g in self.gates)

    @cached_property
    def net_index(self) -> dict[str, int]:
        return {n: k for k, n in enumerate(self.nets)}

    @cached_property
    def gate_index(self) -> dict[str, int]:
        return {g.name: k for k, g in enumerate(self.gates)}

    @cached_property
    def _compiled(self):
        idx = self.net_index
        kind = np.array([KINDS.index(g.kind) for g in self.gates], dtype=np.int8)
        in0 = np.array([idx[g.inputs[0]] for g in self.gates], dtype=np.int64)
        in1 = np.array([idx[g.inputs[-1]] for g in self.gates], dtype=np.int64)
        return kind, in0, in1

    def gate_counts(self) -> dict[str, int]:
        counts = dict.fromkeys(KINDS, 0)
        for g in self.gates:
            counts[g.kind] += 1
        return counts

    def to_text(self) -> str:
        lines = [".inputs " + " ".join(self.inputs), ".outputs " + " ".join(self.outputs)]
        for g in self.gates:
            lines.append(f"{g.name} {g.kind} {' '.join(g.inputs)} -> {g.output}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Netlist":
        inputs, outputs, gates = [], [], []
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if line.startswith(".inputs"):
                inputs = line.split()[1:]
                continue
            if line.startswith(".outputs"):
                outputs = line.split()[1:]
                continue
            head, arrow, out = line.partition("->")
            fields = head.split()
            if not arrow or len(fields) < 3 or len(out.split()) != 1:
                raise NetlistError(f"line {lineno}: expected '<id> <kind> <in>... -> <out>'")
            gates.append(Gate(fields[0], fields[1], tuple(fields[2:]), out.strip()))
        return cls(inputs, outputs, gates)


class NetlistBuilder:
    """Incremental netlist construction with hierarchical instancing."""

    def __init__(self, inputs: Iterable[str]):
        self.inputs = list(inputs)
        self.gates: list[Gate] = []
        self._seq = 0

    def gate(self, kind: str, *ins: str, name: str | None = None, out: str | None = None) -> str:
        if name is None:
            name = f"g{self._seq}"
            self._seq += 1
        out = out or f"{name}.y"
        self.gates.append(Gate(name, kind, tuple(ins), out))
        return out

    def nand(self, a, b, **kw):
        return self.gate(MR_NAND, a, b, **kw)

    def nor(self, a, b, **kw):
        return self.gate(MR_NOR, a, b, **kw)

    def inv(self, a, **kw):
        return self.gate(CMOS_INV, a, **kw)

    def instance(self, sub: Netlist, connect: Mapping[str, str], prefix: str) -> dict[str, str]:
        """Copy ``sub`` in with its inputs bound per ``connect``; returns its output nets."""
        missing = set(sub.inputs) - set(connect)
        if missing:
            raise NetlistError(f"instance {prefix}: unbound inputs {sorted(missing)}")
        rename = dict(connect)
        for g in sub.gates:
            rename[g.output] = f"{prefix}.{g.output}"
        for g in sub.gates:
            self.gates.append(Gate(f"{prefix}.{g.name}", g.kind,
                                   tuple(rename[n] for n in g.inputs), rename[g.output]))
        return {o: rename[o] for o in sub.outputs}

    def build(self, outputs: Iterable[str]) -> Netlist:
        return Netlist(self.inputs, outputs, self.gates)


def build_xor() -> Netlist:
    """Four-NAND exclusive-OR: inputs (a, b), output y."""
    nb = NetlistBuilder(["a", "b"])
    n1 = nb.nand("a", "b", name="n1")
    n2 = nb.nand("a", n1, name="n2")
    n3 = nb.nand("b", n1, name="n3")
    nb.nand(n2, n3, name="n4", out="y")
    return nb.build(["y"])


def build_and3() -> Netlist:
    """Three-input AND as two NAND/INV stages: inputs (a, b, c), output y.

    ``a`` and ``b`` meet in the first stage, so holding ``a`` low freezes
    every gate in the cell regardless of ``c``.
    """
    nb = NetlistBuilder(["a", "b", "c"])
    t = nb.inv(nb.nand("a", "b", name="n1"), name="i1")
    nb.inv(nb.nand(t, "c", name="n2"), name="i2", out="y")
    return nb.build(["y"])


def build_full_adder() -> Netlist:
    """Full adder from two four-NAND XORs sharing their first gates with the carry NAND.

    Inputs (a, b, cin), outputs (sum, cout).  Nine MR_NAND gates in all.
    """
    nb = NetlistBuilder(["a", "b", "cin"])
    n1 = nb.nand("a", "b", name="n1")
    p = nb.nand(nb.nand("a", n1, name="n2"), nb.nand("b", n1, name="n3"), name="n4", out="p")
    n5 = nb.nand(p, "cin", name="n5")
    nb.nand(nb.nand(p, n5, name="n6"), nb.nand("cin", n5, name="n7"), name="n8", out="sum")
    nb.nand(n1, n5, name="n9", out="cout")
    return nb.build(["sum", "cout"])


def build_ripple_adder(width: int) -> Netlist:
    """``width``-bit ripple-carry adder; inputs a0.., b0.., cin; outputs the sum bits LSB-first, then the carry."""
    if width < 1:
        raise ValueError("width must be positive")
    fa = build_full_adder()
    nb = NetlistBuilder([f"a{k}" for k in range(width)] + [f"b{k}" for k in range(width)] + ["cin"])
    carry = "cin"
    sums = []
    for k in range(width):
        o = nb.instance(fa, {"a": f"a{k}", "b": f"b{k}", "cin": carry}, f"fa{k}")
        sums.append(o["sum"])
        carry = o["cout"]
    return nb.build(sums + [carry])


@dataclass
class NetlistEval:
    """Result of evaluating a netlist on a batch of input vectors.

    ``outputs`` maps each primary output to a bool vector over the batch;
    ``toggles`` counts output transitions per gate across the batch, starting
    from ``previous``; ``state`` is the final gate-output snapshot to pass as
    ``previous`` on the next call.
    """

    outputs: dict[str, np.ndarray]
    toggles: np.ndarray
    state: np.ndarray
    path_delays: dict[str, np.ndarray] | None = None
    values: np.ndarray | None = field(default=None, repr=False)


def _as_batch(inputs: Mapping[str, object], netlist: Netlist):
    missing = [n for n in netlist.inputs if n not in inputs]
    if missing:
        raise NetlistError(f"missing input assignment for {', '.join(missing)}")
    cols = [np.atleast_1d(np.asarray(inputs[n])).astype(bool) for n in netlist.inputs]
    size = max((len(c) for c in cols), default=1)
    return np.stack([np.broadcast_to(c, (size,)) for c in cols]) if cols else np.zeros((0, size), bool), size


def eval_netlist(netlist: Netlist, inputs: Mapping[str, object], mr_params: MemristorParams | None = None,
                 models: Mapping[str, GateModel] | None = None, previous: np.ndarray | None = None,
                 delays: bool = True, keep_values: bool = False) -> NetlistEval:
    """Evaluate ``netlist`` on a batch of input assignments.

    Input values may be scalar bits or equal-length bit vectors.  With
    ``previous=None`` the toggle reference is the all-zero snapshot.  Path
    delays are data dependent: every gate contributes the RC delay of its
    actual input state, accumulated along the longest path.
    """
    pis, size = _as_batch(inputs, netlist)
    n_in = len(netlist.inputs)
    kind, in0, in1 = netlist._compiled
    vals = np.empty((len(netlist.nets), size), dtype=bool)
    vals[:n_in] = pis
    for k in range(len(kind)):
        a = vals[in0[k]]
        if kind[k] == 0:
            vals[n_in + k] = ~(a & vals[in1[k]])
        elif kind[k] == 1:
            vals[n_in + k] = ~(a | vals[in1[k]])
        else:
            vals[n_in + k] = ~a

    gate_vals = vals[n_in:]
    if previous is None:
        previous = np.zeros(len(kind), dtype=bool)
    prev = np.asarray(previous, dtype=bool).reshape(-1, 1)
    toggles = np.count_nonzero(gate_vals[:, :1] != prev, axis=1)
    if size > 1:
        toggles = toggles + np.count_nonzero(gate_vals[:, 1:] != gate_vals[:, :-1], axis=1)

    path = None
    if delays:
        mr = mr_params or MemristorParams()
        models = {**DEFAULT_MODELS, **(models or {})}
        arrival = np.zeros((len(netlist.nets), size))
        for k, g in enumerate(netlist.gates):
            ins = [vals[in0[k]], vals[in1[k]]]
            d = gate_delay(g.kind, ins, mr, models[g.kind])
            arrival[n_in + k] = np.maximum(arrival[in0[k]], arrival[in1[k]]) + d
        path = {o: arrival[netlist.net_index[o]] for o in netlist.outputs}

    outputs = {o: vals[netlist.net_index[o]].copy() for o in netlist.outputs}
    return NetlistEval(outputs=outputs, toggles=toggles, state=gate_vals[:, -1].copy(),
                       path_delays=path, values=vals if keep_values else None)


def static_gate_delays(netlist: Netlist, mr_params: MemristorParams | None = None,
                       models: Mapping[str, GateModel] | None = None) -> np.ndarray:
    """Worst-case delay of every gate over its input states."""
    mr = mr_params or MemristorParams()
    models = {**DEFAULT_MODELS, **(models or {})}
    per_kind = {k: worst_case_delay(k, mr, models[k]) for k in KINDS}
    return np.array([per_kind[g.kind] for g in netlist.gates])


def longest_arrival(netlist: Netlist, gate_delays: np.ndarray, seed_gates: Iterable[int] | None = None) -> np.ndarray:
    """Static longest-path arrival time at every net.

    Without ``seed_gates`` every primary input launches at t = 0.  With them,
    only the listed gates launch (their inputs count as arriving at 0) and
    nets outside their fan-out cone stay at ``-inf``.
    """
    n_in = len(netlist.inputs)
    kind, in0, in1 = netlist._compiled
    arrival = np.full(len(netlist.nets), -np.inf)
    seeds = None
    if seed_gates is None:
        arrival[:n_in] = 0.0
    else:
        seeds = np.zeros(len(kind), dtype=bool)
        seeds[list(seed_gates)] = True
    for k in range(len(kind)):
        t = max(arrival[in0[k]], arrival[in1[k]])
        if seeds is not None and seeds[k]:
            t = max(t, 0.0)
        arrival[n_in + k] = t + gate_delays[k]
    return arrival
