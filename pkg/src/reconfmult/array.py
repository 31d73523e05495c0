"""Reconfigurable ripple-carry array multiplier.

An ``n x n`` grid of one-bit blocks.  The block in row ``j`` (multiplier
bit ``b_j``) and column ``i`` (multiplicand bit ``a_i``) contains

* an XOR of the column control bit ``h[i]`` and the row control bit ``v[j]``
  producing the block enable,
* a 3-input AND gating the partial product ``a_i b_j`` with that enable,
* a full adder adding the partial product to the sum arriving from the row
  above (``sin``) and the carry from its right-hand neighbour (``cin``).

Carries ripple along each row, sums move one column down-left per row and the
last row resolves the upper product bits.  A disabled block adds a zero
partial product, so whatever partial sum reaches it passes through unchanged;
that is what lets one segment's product travel to the array edge across
blocks owned by nobody.

Because ``enable = h[i] XOR v[j]``, the enabled region is a union of diagonal
squares: the positions where ``h = 0, v = 1`` and those where ``h = 1, v = 0``.
At most two independent multiplications therefore fit on one control-vector
pair.

Indexing is LSB-first internally (position 0 = least significant bit);
control-vector strings are rendered MSB-first.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import OperandOverflow, UnsupportedPartitioning, ValidationError, WidthOverflow, ZeroWidth
from .gates import Netlist, NetlistBuilder, build_and3, build_full_adder, build_xor, eval_netlist, longest_arrival

MAX_N = 32


@dataclass(frozen=True)
class ControlVectors:
    """Column (``h``) and row (``v``) control bits, LSB-first tuples."""

    h: tuple[int, ...]
    v: tuple[int, ...]

    def __post_init__(self):
        if len(self.h) != len(self.v):
            raise ValidationError(f"h and v differ in length ({len(self.h)} vs {len(self.v)})")
        if any(bit not in (0, 1) for bit in self.h + self.v):
            raise ValidationError("control bits must be 0 or 1")

    @property
    def n(self) -> int:
        return len(self.h)

    @classmethod
    def from_strings(cls, h: str, v: str) -> "ControlVectors":
        if not re.fullmatch(r"[01]*", h + v):
            raise ValidationError("control strings may only contain 0 and 1")
        return cls(tuple(int(c) for c in reversed(h)), tuple(int(c) for c in reversed(v)))

    @property
    def h_str(self) -> str:
        return "".join(str(b) for b in reversed(self.h))

    @property
    def v_str(self) -> str:
        return "".join(str(b) for b in reversed(self.v))


@dataclass(frozen=True)
class Segment:
    offset: int
    width: int
    parity: int  # row-control bit shared by the segment; the column bit is its complement

    @property
    def positions(self) -> range:
        return range(self.offset, self.offset + self.width)


@dataclass(frozen=True)
class PartitionPlan:
    """Partition geometry on an ``n``-bit array.

    ``idle`` is the square left over when a single segment narrower than the
    array is requested.  The XOR rule cannot switch it off, so it is enabled
    but receives no operand bits and contributes nothing.
    """

    n: int
    segments: tuple[Segment, ...]
    ctrl: ControlVectors
    idle: Segment | None = None

    @property
    def widths(self) -> list[int]:
        return [s.width for s in self.segments]

    @property
    def squares(self) -> tuple[Segment, ...]:
        return self.segments + ((self.idle,) if self.idle else ())

    def to_text(self) -> str:
        return (f"n = {self.n}\nwidths = [{', '.join(map(str, self.widths))}]\n"
                f'h = "{self.ctrl.h_str}"\nv = "{self.ctrl.v_str}"\n')


def plan_partitions(n: int, widths: Sequence[int]) -> PartitionPlan:
    """Pack ``widths`` from bit 0 upward and derive the control vectors.

    The first segment gets ``v = 1, h = 0`` and the second ``v = 0, h = 1``.
    """
    widths = [int(w) for w in widths]
    if not 1 <= n <= MAX_N:
        raise ValidationError(f"array width n must lie in [1, {MAX_N}], got {n}")
    if not widths:
        raise ValidationError("widths must be non-empty")
    if any(w <= 0 for w in widths):
        raise ZeroWidth(f"every width must be at least 1, got {widths}")
    if sum(widths) > n:
        raise WidthOverflow(f"widths {widths} need {sum(widths)} bits but the array has {n}")
    if len(widths) > 2:
        raise UnsupportedPartitioning(
            f"{len(widths)} partitions requested; one h/v pair expresses at most 2 diagonal squares")
    if len(widths) == 2 and sum(widths) < n:
        raise UnsupportedPartitioning(
            f"widths {widths} leave {n - sum(widths)} unused bit(s); with two segments those rows and "
            "columns would be enabled against one of the segments")

    segments = []
    offset = 0
    for k, w in enumerate(widths):
        segments.append(Segment(offset, w, 1 - k))
        offset += w
    idle = Segment(offset, n - offset, 0) if offset < n else None

    h = [0] * n
    v = [0] * n
    for seg in segments + ([idle] if idle else []):
        for p in seg.positions:
            v[p] = seg.parity
            h[p] = 1 - seg.parity
    return PartitionPlan(n, tuple(segments), ControlVectors(tuple(h), tuple(v)), idle)


def enabled_mask(ctrl: ControlVectors) -> np.ndarray:
    """``mask[i, j] = h[i] XOR v[j]``; ``i`` is the column, ``j`` the row, both LSB-first."""
    return np.bitwise_xor.outer(np.array(ctrl.h, dtype=np.uint8), np.array(ctrl.v, dtype=np.uint8)).astype(bool)


def squares_mask(n: int, segments: Sequence[Segment]) -> np.ndarray:
    mask = np.zeros((n, n), dtype=bool)
    for s in segments:
        mask[s.offset:s.offset + s.width, s.offset:s.offset + s.width] = True
    return mask


class MultiplierArray:
    """Gate-level netlist of the ``n``-bit array plus per-block gate bookkeeping.

    Primary inputs: ``a0..``, ``b0..``, ``h0..``, ``v0..`` and the constant
    ``gnd``.  Primary outputs: ``p0 .. p{2n-1}``.
    """

    def __init__(self, n: int):
        if n < 1:
            raise ValidationError("array width must be positive")
        self.n = n
        xor, and3, fa = build_xor(), build_and3(), build_full_adder()
        pis = ([f"a{i}" for i in range(n)] + [f"b{j}" for j in range(n)]
               + [f"h{i}" for i in range(n)] + [f"v{j}" for j in range(n)] + ["gnd"])
        nb = NetlistBuilder(pis)
        block_gates: dict[tuple[int, int], list[str]] = {}
        data_gates: dict[tuple[int, int], list[str]] = {}
        partial = ["gnd"] * (2 * n)
        for j in range(n):
            carry = "gnd"
            for i in range(n):
                pre = f"r{j}c{i}"
                start = len(nb.gates)
                en = nb.instance(xor, {"a": f"h{i}", "b": f"v{j}"}, f"{pre}.en")["y"]
                pp = nb.instance(and3, {"a": en, "b": f"b{j}", "c": f"a{i}"}, f"{pre}.and")["y"]
                out = nb.instance(fa, {"a": partial[i + j], "b": pp, "cin": carry}, f"{pre}.fa")
                partial[i + j] = out["sum"]
                carry = out["cout"]
                block_gates[j, i] = [g.name for g in nb.gates[start:]]
                data_gates[j, i] = [f"{pre}.and.n1", f"{pre}.and.n2"]
            partial[n + j] = carry
        self.netlist: Netlist = nb.build(partial)
        gi = self.netlist.gate_index
        self.block_gates = {k: np.array([gi[g] for g in v]) for k, v in block_gates.items()}
        self._data_gates = {k: [gi[g] for g in v] for k, v in data_gates.items()}

    def __repr__(self):
        return f"MultiplierArray(n={self.n}, gates={len(self.netlist)})"

    def input_columns(self, ctrl: ControlVectors, a_bus: np.ndarray, b_bus: np.ndarray) -> dict[str, np.ndarray]:
        cols = {}
        for k in range(self.n):
            cols[f"a{k}"] = a_bus[k]
            cols[f"b{k}"] = b_bus[k]
            cols[f"h{k}"] = bool(ctrl.h[k])
            cols[f"v{k}"] = bool(ctrl.v[k])
        cols["gnd"] = False
        return cols

    def critical_delay(self, plan: PartitionPlan, gate_delays: np.ndarray) -> float:
        """Longest static path from the data inputs of a segment's blocks to that segment's product bits.

        Multi-segment plans report the slowest segment.  Paths run through
        every block on the way, including disabled ones.
        """
        worst = 0.0
        idx = self.netlist.net_index
        for seg in plan.segments:
            seeds = [g for j in seg.positions for i in seg.positions for g in self._data_gates[j, i]]
            arrival = longest_arrival(self.netlist, gate_delays, seeds)
            sinks = [idx[self.netlist.outputs[k]] for k in range(2 * seg.offset, 2 * (seg.offset + seg.width))]
            worst = max(worst, float(arrival[sinks].max()))
        return worst


@lru_cache(maxsize=None)
def build_array(n: int) -> MultiplierArray:
    return MultiplierArray(n)


@dataclass
class ArrayTrace:
    """One or more array evaluations.

    ``raw_product`` is an int for a single evaluation and a uint64 vector for
    a batch; ``toggles`` counts output transitions per gate; ``state`` is the
    final gate snapshot for chaining toggle counts across calls.
    """

    raw_product: int | np.ndarray
    toggles: np.ndarray
    critical_delay: float | None = None
    state: np.ndarray | None = None


def _operand_arrays(plan: PartitionPlan, operand_pairs) -> list[tuple[np.ndarray, np.ndarray]]:
    if len(operand_pairs) != len(plan.segments):
        raise ValidationError(f"plan has {len(plan.segments)} segment(s) but {len(operand_pairs)} operand pair(s) given")
    out = []
    for seg, (a, b) in zip(plan.segments, operand_pairs):
        a = np.atleast_1d(np.asarray(a, dtype=np.int64))
        b = np.atleast_1d(np.asarray(b, dtype=np.int64))
        limit = 1 << seg.width
        for name, x in (("a", a), ("b", b)):
            if x.size and (x.min() < 0 or x.max() >= limit):
                bad = int(x[(x < 0) | (x >= limit)][0])
                raise OperandOverflow(f"operand {name}={bad} does not fit the {seg.width}-bit segment at offset {seg.offset}")
        out.append((a, b))
    return out


def operand_buses(plan: PartitionPlan, operand_pairs) -> tuple[np.ndarray, np.ndarray]:
    """Place each segment's operand bits on its slice of the A and B buses."""
    ops = _operand_arrays(plan, operand_pairs)
    size = max(max(len(a), len(b)) for a, b in ops)
    a_bus = np.zeros((plan.n, size), dtype=bool)
    b_bus = np.zeros((plan.n, size), dtype=bool)
    for seg, (a, b) in zip(plan.segments, ops):
        for k in range(seg.width):
            a_bus[seg.offset + k] = (a >> k) & 1
            b_bus[seg.offset + k] = (b >> k) & 1
    return a_bus, b_bus


def bits_to_int(bits: np.ndarray) -> np.ndarray:
    """Pack an LSB-first (width, batch) bit matrix into uint64 words."""
    weights = np.left_shift(np.uint64(1), np.arange(bits.shape[0], dtype=np.uint64))
    return (bits.astype(np.uint64) * weights[:, None]).sum(axis=0, dtype=np.uint64)


def evaluate_buses(n: int, ctrl: ControlVectors, a_bus: np.ndarray, b_bus: np.ndarray,
                   previous: np.ndarray | None = None, chunk: int = 1 << 14) -> ArrayTrace:
    """Evaluate the array on raw bus values; batch entries are consecutive steps."""
    arr = build_array(n)
    if previous is None:
        previous = reset_state(n, ctrl)
    size = a_bus.shape[1]
    raw = np.empty(size, dtype=np.uint64)
    toggles = np.zeros(len(arr.netlist), dtype=np.int64)
    state = previous
    for lo in range(0, size, chunk):
        hi = min(size, lo + chunk)
        res = eval_netlist(arr.netlist, arr.input_columns(ctrl, a_bus[:, lo:hi], b_bus[:, lo:hi]),
                           previous=state, delays=False)
        raw[lo:hi] = bits_to_int(np.stack([res.outputs[o] for o in arr.netlist.outputs]))
        toggles += res.toggles
        state = res.state
    return ArrayTrace(raw_product=raw, toggles=toggles, state=state)


@lru_cache(maxsize=None)
def _reset_state(n: int, h: tuple, v: tuple) -> np.ndarray:
    arr = build_array(n)
    zeros = np.zeros((n, 1), dtype=bool)
    res = eval_netlist(arr.netlist, arr.input_columns(ControlVectors(h, v), zeros, zeros), delays=False)
    return res.state


def reset_state(n: int, ctrl: ControlVectors) -> np.ndarray:
    """Gate outputs with every operand bit low under ``ctrl``: the toggle reference for a fresh array."""
    return _reset_state(n, ctrl.h, ctrl.v).copy()


def simulate_batch(plan: PartitionPlan, operand_pairs, previous: np.ndarray | None = None) -> ArrayTrace:
    """Evaluate a sequence of operand sets: ``operand_pairs[s] = (a_values, b_values)`` per segment."""
    a_bus, b_bus = operand_buses(plan, operand_pairs)
    return evaluate_buses(plan.n, plan.ctrl, a_bus, b_bus, previous=previous)


def simulate_multiply(n: int, plan: PartitionPlan, operand_pairs: Sequence[tuple[int, int]],
                      gate_delays: np.ndarray | None = None) -> ArrayTrace:
    if plan.n != n:
        raise ValidationError(f"plan is for a {plan.n}-bit array, not {n}")
    trace = simulate_batch(plan, [(a, b) for a, b in operand_pairs])
    trace.raw_product = int(trace.raw_product[0])
    if gate_delays is not None:
        trace.critical_delay = build_array(n).critical_delay(plan, gate_delays)
    return trace


def extract_products(plan: PartitionPlan, raw_product):
    """Slice each segment's ``2w``-bit product out of the raw array output."""
    if isinstance(raw_product, np.ndarray):
        raw = raw_product.astype(np.uint64)
        return [(raw >> np.uint64(2 * s.offset)) & np.uint64((1 << (2 * s.width)) - 1) for s in plan.segments]
    return [(int(raw_product) >> (2 * s.offset)) & ((1 << (2 * s.width)) - 1) for s in plan.segments]


def multiply(n: int, widths: Sequence[int], pairs: Sequence[tuple[int, int]]) -> list[int]:
    plan = plan_partitions(n, widths)
    return extract_products(plan, simulate_multiply(n, plan, pairs).raw_product)
