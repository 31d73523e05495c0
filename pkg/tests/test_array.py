import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reconfmult.array import (ControlVectors, build_array, enabled_mask, evaluate_buses, extract_products, multiply,
                              operand_buses, plan_partitions, simulate_batch, simulate_multiply, squares_mask)
from reconfmult.errors import OperandOverflow, UnsupportedPartitioning, ValidationError, WidthOverflow, ZeroWidth


def valid_plans(n):
    plans = [[w] for w in range(1, n + 1)]
    plans += [[w, n - w] for w in range(1, n)]
    return plans


def all_masks(n):
    """Every mask reachable by some (h, v) on an n-bit array, as a set of bytes."""
    codes = np.arange(1 << n)
    bits = (codes[:, None] >> np.arange(n)) & 1
    masks = bits[:, None, :, None] ^ bits[None, :, None, :]
    return {m.astype(bool).tobytes() for m in masks.reshape(-1, n, n)}


def diagonal_union(n, intervals):
    m = np.zeros((n, n), dtype=bool)
    for lo, hi in intervals:
        m[lo:hi, lo:hi] = True
    return m


def disjoint_interval_sets(n, count):
    spans = [(lo, hi) for lo in range(n) for hi in range(lo + 1, n + 1)]
    for combo in itertools.combinations(spans, count):
        ordered = sorted(combo)
        if all(a[1] <= b[0] for a, b in zip(ordered, ordered[1:])):
            yield ordered


# --- plans and masks -------------------------------------------------------

@pytest.mark.parametrize("n, widths, h, v", [
    (8, [5, 3], "11100000", "00011111"),
    (8, [8], "00000000", "11111111"),
    (4, [2, 2], "1100", "0011"),
])
def test_plan_examples(n, widths, h, v):
    plan = plan_partitions(n, widths)
    assert (plan.ctrl.h_str, plan.ctrl.v_str) == (h, v)


def test_two_two_is_the_unique_pair_for_two_squares():
    target = diagonal_union(4, [(0, 2), (2, 4)])
    hits = []
    for h, v in itertools.product(range(16), repeat=2):
        ctrl = ControlVectors(tuple((h >> k) & 1 for k in range(4)), tuple((v >> k) & 1 for k in range(4)))
        if np.array_equal(enabled_mask(ctrl), target):
            hits.append((ctrl.h_str, ctrl.v_str))
    # the XOR rule is symmetric under complementing both vectors
    assert sorted(hits) == [("0011", "1100"), ("1100", "0011")]


@pytest.mark.parametrize("n", [2, 3, 4])
def test_no_three_way_diagonal_partition_is_expressible(n):
    reachable = all_masks(n)
    for count in range(3, n + 1):
        for intervals in disjoint_interval_sets(n, count):
            assert diagonal_union(n, intervals).tobytes() not in reachable


def test_three_three_two_search_on_eight_bits():
    n = 8
    target = diagonal_union(n, [(0, 3), (3, 6), (6, 8)])
    codes = np.arange(1 << n)
    bits = ((codes[:, None] >> np.arange(n)) & 1).astype(bool)
    found = 0
    for hb in bits:
        masks = hb[None, :, None] ^ bits[:, None, :]
        found += int(np.all(masks == target, axis=(1, 2)).sum())
    assert found == 0
    with pytest.raises(UnsupportedPartitioning):
        plan_partitions(8, [3, 3, 2])


def test_mask_extremes():
    z, o = (0,) * 4, (1,) * 4
    assert not enabled_mask(ControlVectors(z, z)).any()
    assert enabled_mask(ControlVectors(z, o)).all()


def test_fig4_mask_geometry():
    mask = enabled_mask(ControlVectors.from_strings("11100000", "00011111"))
    expect = np.zeros((8, 8), dtype=bool)
    for i, j in itertools.product(range(8), repeat=2):
        expect[i, j] = (i < 5 and j < 5) or (i >= 5 and j >= 5)
    assert np.array_equal(mask, expect)


@pytest.mark.parametrize("n", [1, 2, 4, 8, 16])
def test_mask_is_union_of_squares(n):
    for widths in valid_plans(n):
        plan = plan_partitions(n, widths)
        assert np.array_equal(enabled_mask(plan.ctrl), squares_mask(n, plan.squares))


def test_single_segment_idle_square():
    plan = plan_partitions(8, [4])
    assert plan.idle is not None and (plan.idle.offset, plan.idle.width) == (4, 4)
    assert plan_partitions(8, [8]).idle is None


@pytest.mark.parametrize("n, widths, exc", [
    (8, [5, 4], WidthOverflow),
    (8, [0, 8], ZeroWidth),
    (8, [3, 3, 2], UnsupportedPartitioning),
    (8, [2, 2], UnsupportedPartitioning),
    (0, [1], ValidationError),
    (33, [1], ValidationError),
    (8, [], ValidationError),
])
def test_plan_errors(n, widths, exc):
    with pytest.raises(exc):
        plan_partitions(n, widths)


def test_control_string_round_trip():
    ctrl = ControlVectors.from_strings("1010", "0110")
    assert ctrl.h == (0, 1, 0, 1)
    assert (ctrl.h_str, ctrl.v_str) == ("1010", "0110")
    with pytest.raises(ValidationError):
        ControlVectors.from_strings("10", "012")


# --- arithmetic ------------------------------------------------------------

def test_multiply_examples():
    plan = plan_partitions(8, [8])
    assert simulate_multiply(8, plan, [(13, 11)]).raw_product == 143
    assert multiply(8, [5, 3], [(21, 19), (5, 6)]) == [399, 30]
    assert multiply(8, [4, 4], [(15, 15), (15, 15)]) == [225, 225]
    assert multiply(4, [3, 1], [(7, 5), (1, 1)]) == [35, 1]
    for n in (1, 4, 8):
        for b in range(1 << n):
            assert multiply(n, [n], [(0, b)]) == [0]


def test_extract_examples():
    assert extract_products(plan_partitions(8, [8]), 143) == [143]
    assert extract_products(plan_partitions(8, [5, 3]), 399 + 30 * 2**10) == [399, 30]


def _exhaustive(n, widths):
    plan = plan_partitions(n, widths)
    grids = [np.arange(1 << w) for w in widths]
    cols = [g.ravel() for g in np.meshgrid(*(grids * 2), indexing="ij")]
    k = len(widths)
    pairs = [(cols[s], cols[k + s]) for s in range(k)]
    trace = simulate_batch(plan, pairs)
    return plan, pairs, trace


@pytest.mark.parametrize("widths", valid_plans(4))
def test_oracle_equivalence_n4_exhaustive(widths):
    plan, pairs, trace = _exhaustive(4, widths)
    for got, (a, b) in zip(extract_products(plan, trace.raw_product), pairs):
        assert np.array_equal(got.astype(np.int64), a * b)


def test_reconstruction_n4():
    for widths in valid_plans(4):
        plan, pairs, trace = _exhaustive(4, widths)
        total = sum((a * b) << (2 * s.offset) for s, (a, b) in zip(plan.segments, pairs))
        # an idle square sees only zero operand bits, so it adds nothing
        assert np.array_equal(trace.raw_product.astype(np.int64), total)


@settings(max_examples=60, deadline=None)
@given(data=st.data(), n=st.sampled_from([8, 16]))
def test_oracle_equivalence_random(data, n):
    widths = data.draw(st.sampled_from(valid_plans(n)))
    pairs = [(data.draw(st.integers(0, (1 << w) - 1)), data.draw(st.integers(0, (1 << w) - 1))) for w in widths]
    assert multiply(n, widths, pairs) == [a * b for a, b in pairs]


@settings(max_examples=40, deadline=None)
@given(data=st.data())
def test_partition_independence(data):
    w = data.draw(st.integers(1, 7))
    plan = plan_partitions(8, [w, 8 - w])
    lim = [1 << w, 1 << (8 - w)]
    keep = (data.draw(st.integers(0, lim[1] - 1)), data.draw(st.integers(0, lim[1] - 1)))
    firsts = data.draw(st.lists(st.tuples(st.integers(0, lim[0] - 1), st.integers(0, lim[0] - 1)),
                                min_size=2, max_size=6))
    a = np.array([p[0] for p in firsts])
    b = np.array([p[1] for p in firsts])
    trace = simulate_batch(plan, [(a, b), (np.full(len(a), keep[0]), np.full(len(a), keep[1]))])
    second = extract_products(plan, trace.raw_product)[1]
    assert np.all(second == keep[0] * keep[1])


@pytest.mark.parametrize("w", [1, 3, 5])
def test_disabled_input_immunity(w):
    n = 8
    plan = plan_partitions(n, [w])
    rng = np.random.default_rng(w)
    a = rng.integers(0, 1 << w, 500)
    b = rng.integers(0, 1 << w, 500)
    a_bus, b_bus = operand_buses(plan, [(a, b)])
    clean = extract_products(plan, evaluate_buses(n, plan.ctrl, a_bus, b_bus).raw_product)[0]
    a_bus[w:] = rng.integers(0, 2, (n - w, 500)).astype(bool)
    b_bus[w:] = rng.integers(0, 2, (n - w, 500)).astype(bool)
    noisy = extract_products(plan, evaluate_buses(n, plan.ctrl, a_bus, b_bus).raw_product)[0]
    assert np.array_equal(noisy, clean)
    assert np.array_equal(clean.astype(np.int64), a * b)


@pytest.mark.parametrize("n, w", [(8, 1), (8, 2), (8, 3), (8, 4), (16, 2), (16, 4)])
def test_tunnel_equivalence(n, w):
    vals = np.arange(1 << w)
    a, b = (g.ravel() for g in np.meshgrid(vals, vals, indexing="ij"))
    big = plan_partitions(n, [w])
    small = plan_partitions(w, [w])
    raw_big = simulate_batch(big, [(a, b)]).raw_product
    raw_small = simulate_batch(small, [(a, b)]).raw_product
    assert np.array_equal(extract_products(big, raw_big)[0], raw_small)
    # nothing leaks above the segment's product bits
    assert np.all(raw_big >> np.uint64(2 * w) == 0)


def test_operand_overflow():
    with pytest.raises(OperandOverflow):
        multiply(8, [5, 3], [(32, 1), (1, 1)])
    with pytest.raises(OperandOverflow):
        multiply(8, [5, 3], [(1, 1), (1, 8)])
    with pytest.raises(ValidationError):
        multiply(8, [5, 3], [(1, 1)])


def test_array_structure():
    arr = build_array(4)
    assert len(arr.block_gates) == 16
    sizes = {len(g) for g in arr.block_gates.values()}
    assert sizes == {4 + 4 + 9}
    assert arr.netlist.outputs[0] != arr.netlist.outputs[-1]
    assert len(arr.netlist.outputs) == 8
