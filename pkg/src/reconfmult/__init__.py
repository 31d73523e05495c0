"""Memristor-CMOS reconfigurable array multiplier: device model, gate
library, partitionable array, cost model and small DSP datapaths."""

__version__ = "0.1.0"

from .errors import (NetlistError, OperandOverflow, UnsupportedPartitioning, ValidationError,
                     WidthOverflow, ZeroWidth)
from .device import (MemristorParams, MemristorState, SimTrace, memristance, simulate_waveform,
                     sine_waveform, step_voltage, verify_flux_charge)
from .gates import (CMOS_INV, MR_NAND, MR_NOR, GateModel, Netlist, NetlistBuilder, build_and3,
                    build_full_adder, build_ripple_adder, build_xor, eval_gate, eval_netlist)
from .array import (ControlVectors, MultiplierArray, PartitionPlan, Segment, build_array,
                    enabled_mask, extract_products, multiply, plan_partitions, simulate_batch,
                    simulate_multiply)
from .cost import (CostReport, TechConstants, area_estimate, array_report, compare_report,
                   critical_path_delay, workload_energy)
from .dsp import (ComplexSample, FftConfig, FirConfig, FixedSample, bench_fft, bench_fir, fft4,
                  fir_filter, reference_fft4, reference_fir)
from .scenario import Scenario, dump_scenario, emit_report, load_scenario, parse_scenario

__all__ = [
    "NetlistError",
    "OperandOverflow",
    "UnsupportedPartitioning",
    "ValidationError",
    "WidthOverflow",
    "ZeroWidth",
    "MemristorParams",
    "MemristorState",
    "SimTrace",
    "memristance",
    "simulate_waveform",
    "sine_waveform",
    "step_voltage",
    "verify_flux_charge",
    "CMOS_INV",
    "MR_NAND",
    "MR_NOR",
    "GateModel",
    "Netlist",
    "NetlistBuilder",
    "build_and3",
    "build_full_adder",
    "build_ripple_adder",
    "build_xor",
    "eval_gate",
    "eval_netlist",
    "ControlVectors",
    "MultiplierArray",
    "PartitionPlan",
    "Segment",
    "build_array",
    "enabled_mask",
    "extract_products",
    "multiply",
    "plan_partitions",
    "simulate_batch",
    "simulate_multiply",
    "CostReport",
    "TechConstants",
    "area_estimate",
    "array_report",
    "compare_report",
    "critical_path_delay",
    "workload_energy",
    "ComplexSample",
    "FftConfig",
    "FirConfig",
    "FixedSample",
    "bench_fft",
    "bench_fir",
    "fft4",
    "fir_filter",
    "reference_fft4",
    "reference_fir",
    "Scenario",
    "dump_scenario",
    "emit_report",
    "load_scenario",
    "parse_scenario",
]
