"""
Partitioning the array with control vectors
===========================================

Each block of the n x n array is enabled when its column bit h[i] and row bit
v[j] differ.  That single rule carves the array into at most two diagonal
squares, each an independent multiplier.
"""

# %%
from reconfmult.array import ControlVectors, enabled_mask, multiply, plan_partitions
from reconfmult.errors import UnsupportedPartitioning


def show(plan):
    mask = enabled_mask(plan.ctrl)
    print(f"widths={plan.widths}  h={plan.ctrl.h_str}  v={plan.ctrl.v_str}")
    for j in reversed(range(plan.n)):
        print("   " + "".join("#" if mask[i, j] else "." for i in reversed(range(plan.n))))


# %%
# A 5-bit and a 3-bit product side by side on an 8-bit array.
show(plan_partitions(8, [5, 3]))
print(multiply(8, [5, 3], [(21, 19), (5, 6)]), "==", [21 * 19, 5 * 6])

# %%
# Full width, then two equal halves.
show(plan_partitions(8, [8]))
show(plan_partitions(8, [4, 4]))

# %%
# A lone 3-bit segment.  The XOR rule also lights the opposite 5x5 square;
# nothing drives it, so it only ever adds zero above the 3-bit product.
plan = plan_partitions(8, [3])
show(plan)
print("idle square:", plan.idle)

# %%
# Three segments would need three mutually opposite parities, which two
# values cannot supply, so the planner refuses.
try:
    plan_partitions(8, [3, 3, 2])
except UnsupportedPartitioning as exc:
    print("UnsupportedPartitioning:", exc)

# %%
# Brute force on a 4-bit array agrees: none of the 256 (h, v) pairs gives
# three 1-, 1- and 2-wide squares.
target = {(i, j) for lo, hi in [(0, 1), (1, 2), (2, 4)] for i in range(lo, hi) for j in range(lo, hi)}
hits = 0
for h in range(16):
    for v in range(16):
        ctrl = ControlVectors(tuple((h >> k) & 1 for k in range(4)), tuple((v >> k) & 1 for k in range(4)))
        m = enabled_mask(ctrl)
        hits += {(i, j) for i in range(4) for j in range(4) if m[i, j]} == target
print("control pairs producing the 1+1+2 layout:", hits)
