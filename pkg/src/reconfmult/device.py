"""Linear ion-drift memristor model.

The device is described by a normalized state ``x`` (doped-region width over
device thickness).  Memristance interpolates linearly between ``r_off`` at
``x = 0`` and ``r_on`` at ``x = 1``; the state drifts in proportion to the
current, optionally shaped by a Joglekar window.  Charge and flux are kept as
running integrals so the flux/charge relation ``dphi = M dq`` can be checked
on a recorded trace.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class MemristorParams:
    """Device constants.

    Parameters
    ----------
    r_on : float
        Resistance of the fully doped device (ohms).
    r_off : float
        Resistance of the undoped device (ohms).
    d : float
        Device thickness (m).
    mu_v : float
        Dopant mobility (m^2 V^-1 s^-1).
    window_exponent : int
        Joglekar window exponent ``p``; 0 disables the window.
    """

    r_on: float = 100.0
    r_off: float = 16e3
    d: float = 10e-9
    mu_v: float = 1e-14
    window_exponent: int = 0

    def __post_init__(self):
        if not 0 < self.r_on < self.r_off:
            raise ValueError(f"need 0 < r_on < r_off, got r_on={self.r_on}, r_off={self.r_off}")
        if self.d <= 0:
            raise ValueError(f"d must be positive, got {self.d}")
        if self.mu_v <= 0:
            raise ValueError(f"mu_v must be positive, got {self.mu_v}")
        if int(self.window_exponent) != self.window_exponent or self.window_exponent < 0:
            raise ValueError(f"window_exponent must be a non-negative integer, got {self.window_exponent}")

    @property
    def drift_rate(self) -> float:
        """dx/dq for an unwindowed device, in 1/C."""
        return self.mu_v * self.r_on / self.d**2


@dataclass(frozen=True)
class MemristorState:
    x: float = 0.0
    q: float = 0.0
    phi: float = 0.0
    t: float = 0.0


@dataclass(frozen=True)
class SimTrace:
    """Columns of a simulated waveform, one row per applied voltage sample.

    Row ``k`` describes step ``k``: ``t`` is the time at the end of the step,
    ``v``, ``i``, ``x`` and ``m`` hold during the step, and ``q``/``phi`` are
    the integrals accumulated through the end of the step.
    """

    t: np.ndarray
    v: np.ndarray
    i: np.ndarray
    q: np.ndarray
    phi: np.ndarray
    x: np.ndarray
    m: np.ndarray
    dt: float

    def __len__(self):
        return len(self.t)

    @property
    def samples(self) -> list[tuple[float, ...]]:
        return list(zip(*(getattr(self, c).tolist() for c in TRACE_COLUMNS)))

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(TRACE_COLUMNS)
        for row in self.samples:
            writer.writerow([repr(v) for v in row])
        return buf.getvalue()


TRACE_COLUMNS = ("t", "v", "i", "q", "phi", "x", "m")


def memristance(state: MemristorState | float, params: MemristorParams) -> float:
    x = state.x if isinstance(state, MemristorState) else state
    return params.r_on * x + params.r_off * (1.0 - x)


def window(x: float, p: int) -> float:
    if p == 0:
        return 1.0
    return 1.0 - (2.0 * x - 1.0) ** (2 * p)


def step_voltage(state: MemristorState, params: MemristorParams, v: float, dt: float) -> MemristorState:
    """Advance the device by one forward-Euler step under voltage ``v``."""
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    m = memristance(state, params)
    i = v / m
    x = state.x + params.drift_rate * i * window(state.x, params.window_exponent) * dt
    x = min(1.0, max(0.0, x))
    return MemristorState(x=x, q=state.q + i * dt, phi=state.phi + v * dt, t=state.t + dt)


def simulate_waveform(params: MemristorParams, waveform: Sequence[float], dt: float, x0: float = 0.0) -> SimTrace:
    waveform = [float(v) for v in waveform]
    if not waveform:
        raise ValueError("waveform is empty")
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if not 0.0 <= x0 <= 1.0:
        raise ValueError(f"x0 must lie in [0, 1], got {x0}")

    n = len(waveform)
    cols = {c: np.empty(n) for c in TRACE_COLUMNS}
    state = MemristorState(x=x0)
    sum_i = 0.0
    sum_v = 0.0
    for k, v in enumerate(waveform):
        m = memristance(state, params)
        i = v / m
        # integrals are dt times the left-to-right sums, so the final values are exact by construction
        sum_i += i
        sum_v += v
        cols["v"][k] = v
        cols["i"][k] = i
        cols["m"][k] = m
        cols["x"][k] = state.x
        cols["q"][k] = dt * sum_i
        cols["phi"][k] = dt * sum_v
        cols["t"][k] = (k + 1) * dt
        state = step_voltage(state, params, v, dt)
    return SimTrace(dt=dt, **cols)


def verify_flux_charge(trace: SimTrace, params: MemristorParams) -> float:
    """Largest per-step violation of ``dphi = M dq``, relative to the flux range.

    ``M`` over each interval is the mean of the memristance recomputed from
    the state at both neighbouring samples, so the residual vanishes as the
    step shrinks and is exactly zero wherever the state does not move.
    """
    if len(trace) < 2:
        raise ValueError("need at least 2 samples")
    m = memristance(trace.x, params)
    m_mid = 0.5 * (m[1:] + m[:-1])
    err = np.abs(np.diff(trace.phi) - m_mid * np.diff(trace.q))
    worst = float(err.max())
    span = float(trace.phi.max() - trace.phi.min())
    if worst == 0.0:
        return 0.0
    return worst / span if span > 0 else worst


def sine_waveform(amplitude: float, frequency: float, dt: float, periods: float = 1.0) -> np.ndarray:
    """Samples of ``amplitude * sin(2 pi f t)`` on ``t = k dt`` covering ``periods`` periods."""
    n = int(round(periods / (frequency * dt)))
    t = np.arange(n) * dt
    v = amplitude * np.sin(2 * math.pi * frequency * t)
    # sin(k*pi) is not exactly zero in floating point; snap the nodes
    phase = 2 * frequency * t
    v[np.isclose(phase, np.round(phase), rtol=0, atol=1e-9)] = 0.0
    return v


def params_from_mapping(values: dict) -> MemristorParams:
    unknown = set(values) - set(MemristorParams.__dataclass_fields__)
    if unknown:
        raise ValueError(f"unknown device parameter(s): {', '.join(sorted(unknown))}")
    return replace(MemristorParams(), **values)
