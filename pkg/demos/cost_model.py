"""
Delay, energy and area
======================

Static timing on the gate netlist gives the critical path of each partition,
toggle counting gives switching energy, and weighted gate counts give area.
"""

# %%
import numpy as np

from reconfmult.array import plan_partitions
from reconfmult.cost import PUBLISHED_RATIOS, REFERENCE_DESIGNS, area_estimate, critical_path_delay, workload_energy

# %%
# Critical path for every single-segment plan on an 8-bit array.
for w in range(1, 9):
    d = critical_path_delay(8, plan_partitions(8, [w]))
    print(f"[{w}] {d * 1e9:5.2f} ns")

# %%
# Two segments run no slower than their widest member plus the tunnel ripple.
for widths in ([4, 4], [5, 3], [6, 2], [7, 1]):
    d = critical_path_delay(8, plan_partitions(8, widths))
    print(f"{widths} {d * 1e9:5.2f} ns")

# %%
# Energy over 1000 random steps: one 8x8 product versus two 4x4 products.
rng = np.random.default_rng(3)
e8, p8 = workload_energy(8, plan_partitions(8, [8]), rng.integers(0, 256, (1000, 1, 2)).tolist())
e44, p44 = workload_energy(8, plan_partitions(8, [4, 4]), rng.integers(0, 16, (1000, 2, 2)).tolist())
print(f"[8]   {e8 * 1e12:8.1f} pJ  {p8 * 1e3:.3f} mW")
print(f"[4,4] {e44 * 1e12:8.1f} pJ  {p44 * 1e3:.3f} mW  ratio {e44 / e8:.2f}")

# %%
# Area against a plain CMOS ripple-carry array, alongside the reference figures.
for n in (4, 8, 16, 32):
    print(f"n={n:2d}: ratio {area_estimate(n) / area_estimate(n, 'cmos'):.3f}")
print("published 32-bit ratio:", PUBLISHED_RATIOS["area_32bit"]["area"])
for name, row in REFERENCE_DESIGNS.items():
    print(f"  {name:17s} {row['delay_ns']:5.1f} ns {row['avg_power_mw']:5.1f} mW {row['area_um2']:6.1f} um^2")
