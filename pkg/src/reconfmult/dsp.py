"""Fixed-point FIR filter and 4-point FFT running on the reconfigurable array.

Samples are sign-magnitude: magnitudes go through the unsigned array, the
product sign is the XOR of the operand signs.  Additions run on gate-level
ripple-carry adders in two's complement, followed by saturation.

Both datapaths have a fixed set of physical units (four multipliers and a
three-adder chain for the FIR; eight multipliers and twenty adders for the
FFT).  With an 8-bit plan every multiplier handles one lane per clock cycle.
With a 4+4 plan each multiplier carries two independent 4-bit products per
cycle, so the datapath runs two lanes: even and odd outputs for the FIR, two
frames for the FFT.  Arithmetic per output is the same in both modes.

Fixed-point policy, for lane width ``w`` (8, or 4 under 4+4):

* multiplier operands are ``w``-bit magnitudes,
* products are exact ``2w``-bit magnitudes,
* every addition saturates to a ``2w``-bit magnitude, except the FFT's first
  butterfly stage, which saturates to ``w`` bits so its results can feed the
  multipliers,
* twiddles are Q(w-1): ``2**(w-1)`` stands for 1.0 and twiddle products are
  truncated toward zero by ``w - 1`` bits.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .array import build_array, extract_products, plan_partitions, simulate_batch
from .cost import (DEFAULT_TECH, CostReport, TechConstants, adder, array_gate_counts, critical_path_delay, netlist_delay,
                   toggle_energy, weighted_area)
from .errors import OperandOverflow, ValidationError
from .gates import eval_netlist

N_TAPS = 4


@dataclass(frozen=True)
class FixedSample:
    sign: int
    magnitude: int
    width: int = 8

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValidationError(f"sign must be +1 or -1, got {self.sign}")
        if not 0 <= self.magnitude < (1 << self.width):
            raise OperandOverflow(f"magnitude {self.magnitude} does not fit {self.width} bits")

    @property
    def value(self) -> int:
        return self.sign * self.magnitude

    @classmethod
    def from_int(cls, value: int, width: int = 8) -> "FixedSample":
        value = int(value)
        return cls(-1 if value < 0 else 1, abs(value), width)


@dataclass(frozen=True)
class ComplexSample:
    re: FixedSample
    im: FixedSample

    @property
    def value(self) -> complex:
        return complex(self.re.value, self.im.value)

    @classmethod
    def from_ints(cls, re: int, im: int, width: int = 8) -> "ComplexSample":
        return cls(FixedSample.from_int(re, width), FixedSample.from_int(im, width))


def _lane_width(widths: Sequence[int]) -> int:
    widths = tuple(widths)
    if widths not in ((8,), (4, 4)):
        raise ValidationError(f"DSP datapaths support the plans [8] and [4, 4], got {list(widths)}")
    return widths[0]


@dataclass(frozen=True)
class FirConfig:
    coefficients: tuple[FixedSample, ...]
    widths: tuple[int, ...] = (8,)
    n: int = 8

    def __post_init__(self):
        object.__setattr__(self, "coefficients", tuple(self.coefficients))
        object.__setattr__(self, "widths", tuple(self.widths))
        if len(self.coefficients) != N_TAPS:
            raise ValidationError(f"the FIR has exactly {N_TAPS} taps, got {len(self.coefficients)}")
        w = _lane_width(self.widths)
        for c in self.coefficients:
            if c.magnitude >= 1 << w:
                raise OperandOverflow(f"coefficient magnitude {c.magnitude} does not fit the {w}-bit lane")

    @property
    def lane_width(self) -> int:
        return self.widths[0]

    @property
    def acc_bits(self) -> int:
        return 2 * self.lane_width

    @classmethod
    def from_ints(cls, coefficients: Sequence[int], widths: Sequence[int] = (8,)) -> "FirConfig":
        return cls(tuple(FixedSample.from_int(c) for c in coefficients), tuple(widths))


def exact_twiddles(width: int) -> tuple[tuple[int, int], tuple[int, int]]:
    one = 1 << (width - 1)
    return (one, 0), (0, -one)


def random_twiddles(width: int, seed: int) -> tuple[tuple[int, int], tuple[int, int]]:
    rng = np.random.default_rng(seed)
    lim = (1 << width) - 1
    vals = rng.integers(-lim, lim + 1, size=4)
    return (int(vals[0]), int(vals[1])), (int(vals[2]), int(vals[3]))


@dataclass(frozen=True)
class FftConfig:
    """4-point FFT settings.

    ``mode='exact'`` uses the twiddles 1 and -j; ``mode='random'`` draws both
    twiddles from a generator seeded with ``seed``, which is then required.
    """

    widths: tuple[int, ...] = (8,)
    mode: str = "exact"
    seed: int | None = None
    n: int = 8
    twiddles: tuple[ComplexSample, ComplexSample] = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "widths", tuple(self.widths))
        w = _lane_width(self.widths)
        if self.mode == "exact":
            tw = exact_twiddles(w)
        elif self.mode == "random":
            if self.seed is None:
                raise ValidationError("random-twiddle mode needs a seed")
            tw = random_twiddles(w, self.seed)
        else:
            raise ValidationError(f"mode must be 'exact' or 'random', got {self.mode!r}")
        object.__setattr__(self, "twiddles", tuple(ComplexSample.from_ints(re, im, w) for re, im in tw))

    @property
    def lane_width(self) -> int:
        return self.widths[0]

    @property
    def acc_bits(self) -> int:
        return 2 * self.lane_width

    def twiddle_ints(self) -> list[tuple[int, int]]:
        return [(t.re.value, t.im.value) for t in self.twiddles]


def saturate(x: np.ndarray, bits: int) -> np.ndarray:
    lim = (1 << bits) - 1
    return np.clip(x, -lim, lim)


def truncate_shift(x: np.ndarray, shift: int) -> np.ndarray:
    """Drop ``shift`` fraction bits from a sign-magnitude value (rounds toward zero)."""
    mag = np.abs(x) >> shift
    return np.where(x < 0, -mag, mag)


class Datapath:
    """Physical multiplier and adder units with per-unit toggle history.

    Every operation takes one int64 vector per lane, indexed by clock cycle.
    """

    def __init__(self, widths: Sequence[int], n: int = 8, tech: TechConstants = DEFAULT_TECH):
        self.plan = plan_partitions(n, widths)
        self.lanes = len(self.plan.segments)
        self.lane_width = self.plan.segments[0].width
        self.adder_width = 2 * self.lane_width + 2
        self.tech = tech
        self.array = build_array(n)
        self.adder = adder(self.adder_width)
        self._mult_state: dict = {}
        self._add_state: dict = {}
        self.energy = 0.0
        self.mult_units: set = set()
        self.add_units: set = set()

    def mul(self, unit, a: Sequence[np.ndarray], b: Sequence[np.ndarray]) -> list[np.ndarray]:
        self.mult_units.add(unit)
        pairs = [(np.abs(x), np.abs(y)) for x, y in zip(a, b)]
        trace = simulate_batch(self.plan, pairs, previous=self._mult_state.get(unit))
        self._mult_state[unit] = trace.state
        self.energy += toggle_energy(self.array.netlist, trace.toggles, self.tech)
        mags = extract_products(self.plan, trace.raw_product)
        return [np.where((x < 0) ^ (y < 0), -m.astype(np.int64), m.astype(np.int64)) for x, y, m in zip(a, b, mags)]

    def add(self, unit, x: Sequence[np.ndarray], y: Sequence[np.ndarray]) -> list[np.ndarray]:
        out = []
        width = self.adder_width
        mask = (1 << width) - 1
        shifts = np.arange(width)
        for lane, (xl, yl) in enumerate(zip(x, y)):
            key = (unit, lane)
            self.add_units.add(key)
            xb = ((xl[None, :] & mask) >> shifts[:, None]) & 1
            yb = ((yl[None, :] & mask) >> shifts[:, None]) & 1
            cols = {f"a{k}": xb[k] for k in range(width)}
            cols.update({f"b{k}": yb[k] for k in range(width)})
            cols["cin"] = False
            res = eval_netlist(self.adder, cols, previous=self._add_state.get(key, self._adder_reset()), delays=False)
            self._add_state[key] = res.state
            self.energy += toggle_energy(self.adder, res.toggles, self.tech)
            bits = np.stack([res.outputs[o] for o in self.adder.outputs[:width]]).astype(np.int64)
            raw = (bits << shifts[:, None]).sum(axis=0)
            out.append(np.where(raw >= 1 << (width - 1), raw - (1 << width), raw))
        return out

    def _adder_reset(self):
        if not hasattr(self, "_reset"):
            zeros = {name: False for name in self.adder.inputs}
            self._reset = eval_netlist(self.adder, zeros, delays=False).state
        return self._reset

    def report(self, cycles: int, adders_on_path: int, mults_on_path: int = 1) -> CostReport:
        mult_delay = critical_path_delay(self.plan.n, self.plan, self.tech)
        add_delay = netlist_delay(self.adder, self.tech)
        counts: dict[str, int] = {}
        for _ in self.mult_units:
            for k, c in array_gate_counts(self.plan.n).items():
                counts[k] = counts.get(k, 0) + c
        for _ in self.add_units:
            for k, c in self.adder.gate_counts().items():
                counts[k] = counts.get(k, 0) + c
        return CostReport(
            delay_s=mults_on_path * mult_delay + adders_on_path * add_delay,
            energy_j=self.energy,
            avg_power_w=self.energy * self.tech.frequency / cycles if cycles else 0.0,
            area_units=weighted_area(counts, self.tech),
            gate_count=sum(counts.values()),
        )


def _values(samples, width: int) -> np.ndarray:
    vals = np.array([s.value if isinstance(s, FixedSample) else int(s) for s in samples], dtype=np.int64)
    if vals.size and np.abs(vals).max() >= 1 << width:
        bad = int(vals[np.abs(vals) >= 1 << width][0])
        raise OperandOverflow(f"sample {bad} does not fit the {width}-bit lane")
    return vals


def fir_values(cfg: FirConfig, samples: Sequence, tech: TechConstants = DEFAULT_TECH) -> tuple[np.ndarray, CostReport]:
    """Array-backed FIR on integer samples; returns signed outputs and the cost of the run."""
    w = cfg.lane_width
    x = _values(samples, w)
    dp = Datapath(cfg.widths, cfg.n, tech)
    lanes = dp.lanes
    cycles = -(-len(x) // lanes)
    padded = np.concatenate([np.zeros(N_TAPS - 1, dtype=np.int64), x,
                             np.zeros(cycles * lanes - len(x), dtype=np.int64)])
    coeffs = [c.value for c in cfg.coefficients]
    if cycles == 0:
        return np.zeros(0, dtype=np.int64), dp.report(0, N_TAPS - 1)

    def tap(t, lane):
        # output index k = cycle*lanes + lane reads x[k - t]
        start = N_TAPS - 1 + lane - t
        return padded[start:start + cycles * lanes:lanes]

    products = [dp.mul(("mult", t), [np.full(cycles, coeffs[t], dtype=np.int64)] * lanes,
                       [tap(t, lane) for lane in range(lanes)]) for t in range(N_TAPS)]
    acc = products[0]
    for t in range(1, N_TAPS):
        acc = [saturate(s, cfg.acc_bits) for s in dp.add(("add", t), acc, products[t])]
    y = np.stack(acc, axis=1).reshape(-1)[:len(x)]
    return y, dp.report(cycles, adders_on_path=N_TAPS - 1)


def fir_filter(cfg: FirConfig, samples: Sequence[FixedSample],
               tech: TechConstants = DEFAULT_TECH) -> tuple[list[FixedSample], CostReport]:
    y, cost = fir_values(cfg, samples, tech)
    return [FixedSample.from_int(v, cfg.acc_bits) for v in y], cost


def reference_fir(cfg: FirConfig, samples: Sequence) -> list[int]:
    """Direct convolution in Python integers with the same saturation points."""
    x = [s.value if isinstance(s, FixedSample) else int(s) for s in samples]
    lim = (1 << cfg.acc_bits) - 1
    if any(abs(v) >= 1 << cfg.lane_width for v in x):
        raise OperandOverflow(f"sample exceeds the {cfg.lane_width}-bit lane")
    c = [s.value for s in cfg.coefficients]
    out = []
    for k in range(len(x)):
        terms = [c[t] * (x[k - t] if k - t >= 0 else 0) for t in range(N_TAPS)]
        acc = terms[0]
        for term in terms[1:]:
            acc = max(-lim, min(lim, acc + term))
        out.append(acc)
    return out


def _frame_values(frames, width: int) -> np.ndarray:
    """(F, 4, 2) int array of (re, im) from ComplexSamples, complex numbers or pairs."""
    rows = []
    for frame in frames:
        if len(frame) != 4:
            raise ValidationError(f"a 4-point FFT frame needs 4 inputs, got {len(frame)}")
        row = []
        for s in frame:
            if isinstance(s, ComplexSample):
                row.append((s.re.value, s.im.value))
            elif isinstance(s, complex):
                row.append((int(s.real), int(s.imag)))
            else:
                row.append((int(s[0]), int(s[1])))
        rows.append(row)
    vals = np.array(rows, dtype=np.int64).reshape(len(rows), 4, 2)
    if vals.size and np.abs(vals).max() >= 1 << width:
        raise OperandOverflow(f"FFT input exceeds the {width}-bit lane")
    return vals


def fft4_values(cfg: FftConfig, frames, tech: TechConstants = DEFAULT_TECH) -> tuple[np.ndarray, CostReport]:
    """Array-backed 4-point FFT over a batch of frames; returns (F, 4, 2) signed bins."""
    w = cfg.lane_width
    vals = _frame_values(frames, w)
    dp = Datapath(cfg.widths, cfg.n, tech)
    lanes = dp.lanes
    n_frames = len(vals)
    cycles = -(-n_frames // lanes)
    if cycles == 0:
        return np.zeros((0, 4, 2), dtype=np.int64), dp.report(0, 3)
    padded = np.zeros((cycles * lanes, 4, 2), dtype=np.int64)
    padded[:n_frames] = vals

    def lane_cols(idx, part):
        return [padded[lane::lanes, idx, part] for lane in range(lanes)]

    def neg(xs):
        return [-v for v in xs]

    def sat(xs, bits):
        return [saturate(v, bits) for v in xs]

    x = [(lane_cols(i, 0), lane_cols(i, 1)) for i in range(4)]
    # first butterfly stage: (x0, x2) and (x1, x3)
    a = [None] * 4
    for k, (p, q, s) in enumerate([(0, 2, 1), (0, 2, -1), (1, 3, 1), (1, 3, -1)]):
        qre, qim = x[q] if s > 0 else (neg(x[q][0]), neg(x[q][1]))
        a[k] = (sat(dp.add(("s1", k, "re"), x[p][0], qre), w), sat(dp.add(("s1", k, "im"), x[p][1], qim), w))

    twiddles = cfg.twiddle_ints()
    frac = w - 1
    t = []
    for k, (src, (wr, wi)) in enumerate(zip((a[2], a[3]), twiddles)):
        wr_l = [np.full(cycles, wr, dtype=np.int64)] * lanes
        wi_l = [np.full(cycles, wi, dtype=np.int64)] * lanes
        rr = [truncate_shift(v, frac) for v in dp.mul(("m", k, "rr"), src[0], wr_l)]
        ii = [truncate_shift(v, frac) for v in dp.mul(("m", k, "ii"), src[1], wi_l)]
        ri = [truncate_shift(v, frac) for v in dp.mul(("m", k, "ri"), src[0], wi_l)]
        ir = [truncate_shift(v, frac) for v in dp.mul(("m", k, "ir"), src[1], wr_l)]
        t.append((sat(dp.add(("cm", k, "re"), rr, neg(ii)), cfg.acc_bits),
                  sat(dp.add(("cm", k, "im"), ri, ir), cfg.acc_bits)))

    bins = [None] * 4
    for k, (p, q, s) in enumerate([(0, 0, 1), (1, 1, 1), (0, 0, -1), (1, 1, -1)]):
        top = a[p]
        bot = t[q] if s > 0 else (neg(t[q][0]), neg(t[q][1]))
        bins[k] = (sat(dp.add(("s2", k, "re"), top[0], bot[0]), cfg.acc_bits),
                   sat(dp.add(("s2", k, "im"), top[1], bot[1]), cfg.acc_bits))

    out = np.empty((cycles * lanes, 4, 2), dtype=np.int64)
    for k in range(4):
        for part in range(2):
            out[:, k, part] = np.stack(bins[k][part], axis=1).reshape(-1)
    return out[:n_frames], dp.report(cycles, adders_on_path=3)


def fft4(cfg: FftConfig, inputs: Sequence, tech: TechConstants = DEFAULT_TECH) -> tuple[list[ComplexSample], CostReport]:
    bins, cost = fft4_values(cfg, [inputs], tech)
    return [ComplexSample.from_ints(re, im, cfg.acc_bits) for re, im in bins[0]], cost


def reference_fft4(cfg: FftConfig, inputs: Sequence) -> list[complex]:
    """Radix-2 4-point DFT in Python integers with the same quantization points."""
    (x,) = _frame_values([inputs], cfg.lane_width).tolist()
    w = cfg.lane_width
    small = (1 << w) - 1
    big = (1 << cfg.acc_bits) - 1

    def clamp(v, lim):
        return max(-lim, min(lim, v))

    def q(v):
        return v >> (w - 1) if v >= 0 else -((-v) >> (w - 1))

    def cadd(p, r, lim):
        return (clamp(p[0] + r[0], lim), clamp(p[1] + r[1], lim))

    def cneg(p):
        return (-p[0], -p[1])

    a0 = cadd(x[0], x[2], small)
    a1 = cadd(x[0], cneg(x[2]), small)
    a2 = cadd(x[1], x[3], small)
    a3 = cadd(x[1], cneg(x[3]), small)
    prods = []
    for (re, im), (wr, wi) in zip((a2, a3), cfg.twiddle_ints()):
        prods.append((clamp(q(re * wr) - q(im * wi), big), clamp(q(re * wi) + q(im * wr), big)))
    bins = [cadd(a0, prods[0], big), cadd(a1, prods[1], big), cadd(a0, cneg(prods[0]), big),
            cadd(a1, cneg(prods[1]), big)]
    return [complex(re, im) for re, im in bins]


def random_samples(rng: np.random.Generator, count: int, width: int) -> np.ndarray:
    lim = (1 << width) - 1
    return rng.integers(-lim, lim + 1, size=count)


def bench_fir(widths: Sequence[int], cycles: int, seed: int, tech: TechConstants = DEFAULT_TECH) -> CostReport:
    """Run the FIR for ``cycles`` clock cycles on seeded random coefficients and samples."""
    w = _lane_width(widths)
    rng = np.random.default_rng(seed)
    coeffs = random_samples(rng, N_TAPS, w)
    lanes = len(widths)
    x = random_samples(rng, cycles * lanes, w)
    _, cost = fir_values(FirConfig.from_ints(coeffs, widths), x, tech)
    return cost


def bench_fft(widths: Sequence[int], cycles: int, seed: int, tech: TechConstants = DEFAULT_TECH) -> CostReport:
    """Run the FFT with random twiddles for ``cycles`` clock cycles on seeded random frames."""
    w = _lane_width(widths)
    rng = np.random.default_rng(seed)
    lanes = len(widths)
    frames = random_samples(rng, cycles * lanes * 8, w).reshape(-1, 4, 2)
    cfg = FftConfig(widths=tuple(widths), mode="random", seed=seed)
    _, cost = fft4_values(cfg, [[tuple(p) for p in f] for f in frames], tech)
    return cost
