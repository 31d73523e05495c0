"""
FIR and FFT on the reconfigurable array
=======================================

A 4-tap FIR and a 4-point FFT, each run once with every multiplier set to a
single 8-bit product and once split into two 4-bit lanes.  Results are
checked against plain-integer references before the costs are compared.
"""

# %%
import numpy as np

from reconfmult.cost import compare_report
from reconfmult.dsp import (FftConfig, FirConfig, bench_fft, bench_fir, fft4_values, fir_values, random_samples,
                            reference_fft4, reference_fir)

rng = np.random.default_rng(42)

# %%
# FIR correctness in both modes.  In 4+4 mode the data are restricted to
# 4-bit magnitudes and two outputs are produced per cycle.
for widths in ((8,), (4, 4)):
    w = widths[0]
    cfg = FirConfig.from_ints(random_samples(rng, 4, w), widths)
    x = random_samples(rng, 2000, w)
    y, cost = fir_values(cfg, x)
    print(f"FIR {widths}: matches reference {y.tolist() == reference_fir(cfg, x)}, "
          f"delay {cost.delay_s * 1e9:.2f} ns")

# %%
# FFT of a constant lands entirely in bin 0.
bins, _ = fft4_values(FftConfig((8,)), [[(9, -4)] * 4])
print("FFT of constant 9-4j:", [complex(*b) for b in bins[0].tolist()])

# %%
# Random twiddles, checked frame by frame.
cfg = FftConfig((4, 4), mode="random", seed=7)
frames = random_samples(rng, 500 * 8, 4).reshape(-1, 4, 2).tolist()
bins, _ = fft4_values(cfg, frames)
ok = all([complex(*b) for b in got] == reference_fft4(cfg, f) for f, got in zip(frames, bins.tolist()))
print(f"FFT 4+4 with twiddles {cfg.twiddle_ints()}: matches reference {ok}")

# %%
# The comparison: same number of cycles, so energy and power ratios coincide.
for name, fn in (("fir", bench_fir), ("fft", bench_fft)):
    cmp = compare_report(fn((4, 4), 1000, 1), fn((8,), 1000, 1), name)
    r, pub = cmp["ratios"], cmp["paper_reference_ratios"]
    print(f"{name.upper()}: delay {r['delay']:.2f} (published {pub['delay']:.2f}), "
          f"power {r['power']:.2f} (published {pub['power']:.2f})")
