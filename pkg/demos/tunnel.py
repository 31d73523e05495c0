"""
Propagation tunnels
===================

A narrow product computed in the low corner of a wide array has to travel
through disabled blocks to reach the outputs.  Disabled blocks add a zero
partial product, so the sum passes through untouched.
"""

# %%
import numpy as np

from reconfmult.array import build_array, extract_products, plan_partitions, simulate_batch

# %%
# Every 4-bit product on the 8-bit array versus a dedicated 4-bit array.
vals = np.arange(16)
a, b = (g.ravel() for g in np.meshgrid(vals, vals, indexing="ij"))
wide = plan_partitions(8, [4])
narrow = plan_partitions(4, [4])
raw_wide = simulate_batch(wide, [(a, b)]).raw_product
raw_narrow = simulate_batch(narrow, [(a, b)]).raw_product
same = np.array_equal(extract_products(wide, raw_wide)[0], raw_narrow)
print(f"256 products, identical to the dedicated array: {same}")
print(f"highest raw output on the wide array: {int(raw_wide.max())} (fits in 8 bits)")

# %%
# Where does the switching happen?  Count toggles per block over a random
# workload and print them MSB first, so bit 0 sits at the bottom right.
rng = np.random.default_rng(0)
a = rng.integers(0, 16, 2000)
b = rng.integers(0, 16, 2000)
trace = simulate_batch(wide, [(a, b)])
arr = build_array(8)
grid = np.zeros((8, 8), dtype=int)
for (j, i), gates in arr.block_gates.items():
    grid[j, i] = trace.toggles[gates].sum()
for j in reversed(range(8)):
    print("  ".join(f"{grid[j, i]:5d}" for i in reversed(range(8))))

# %%
# The active 4x4 corner (bottom right) switches the most.  Tunnel blocks in
# the rows above it carry the partial sums on to the outputs.  The idle square
# (top left) never toggles because its operand lines stay low.
active = grid[:4, :4].sum()
idle = grid[4:, 4:].sum()
print(f"active corner {active}, tunnel {grid.sum() - active - idle}, idle square {idle}")
