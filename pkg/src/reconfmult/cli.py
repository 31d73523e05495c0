"""Command-line front end.

Every command prints one document: structured (canonical JSON), human
(aligned ``field  value`` lines) or CSV.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import __version__
from .array import enabled_mask, extract_products, plan_partitions, simulate_batch
from .cost import PUBLISHED_RATIOS, REFERENCE_DESIGNS, CostReport, TechConstants, array_report, compare_report
from .device import MemristorParams, simulate_waveform, sine_waveform, verify_flux_charge
from .dsp import bench_fft, bench_fir
from .errors import ValidationError
from .scenario import FORMATS, Scenario, ScenarioError, Workload, emit_report, load_scenario

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_VALIDATION = 3
EXIT_INTERNAL = 4

EPILOG = f"""exit codes:
  {EXIT_OK}  success
  {EXIT_USAGE}  usage error (bad flags or arguments)
  {EXIT_VALIDATION}  validation error (e.g. UnsupportedPartitioning, WidthOverflow, OperandOverflow, bad scenario)
  {EXIT_INTERNAL}  internal error
"""


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _pairs(text: str) -> list[tuple[int, int]]:
    out = []
    for item in text.split(","):
        a, sep, b = item.strip().partition("x")
        if not sep:
            raise argparse.ArgumentTypeError(f"pairs look like 21x19,5x6; got {item!r}")
        try:
            out.append((int(a), int(b)))
        except ValueError:
            raise argparse.ArgumentTypeError(f"non-integer operand in {item!r}") from None
    return out


def _scenario(args) -> tuple[Scenario, Path | None]:
    if getattr(args, "scenario", None):
        sc = load_scenario(args.scenario)
        base = Path(args.scenario).parent
    else:
        if args.n is None or args.widths is None:
            raise UsageError("give --n and --widths, or --scenario")
        sc = Scenario(n=args.n, widths=args.widths)
        base = None
    if getattr(args, "pairs", None):
        sc.workload = Workload(source="inline", pairs=args.pairs)
    if getattr(args, "format", None):
        sc.format = args.format
    if getattr(args, "seed", None) is not None:
        sc.seed = args.seed
    sc.validate()
    return sc, base


def cmd_plan(args) -> dict:
    sc, _ = _scenario(args)
    plan = plan_partitions(sc.n, sc.widths)
    mask = enabled_mask(plan.ctrl)
    # rendered with the MSB row and column first, matching the control strings
    rows = ["".join("1" if mask[i, j] else "." for i in reversed(range(sc.n))) for j in reversed(range(sc.n))]
    return {
        "command": "plan",
        "scenario": {"n": sc.n, "widths": sc.widths},
        "results": {
            "h": plan.ctrl.h_str,
            "v": plan.ctrl.v_str,
            "segments": [{"offset": s.offset, "width": s.width} for s in plan.segments],
            "idle": {"offset": plan.idle.offset, "width": plan.idle.width} if plan.idle else None,
            "mask": rows,
        },
    }


def _render_plan(doc: dict) -> str:
    r = doc["results"]
    lines = [f"h={r['h']} v={r['v']}"]
    lines += [f"segment {k}: offset={s['offset']} width={s['width']}" for k, s in enumerate(r["segments"])]
    if r["idle"]:
        lines.append(f"idle square: offset={r['idle']['offset']} width={r['idle']['width']} (enabled, no operands)")
    lines.append("mask (row j = b bit, column i = a bit, MSB first):")
    lines += ["  " + row for row in r["mask"]]
    return "\n".join(lines) + "\n"


def cmd_multiply(args) -> dict:
    sc, base = _scenario(args)
    plan = plan_partitions(sc.n, sc.widths)
    steps = sc.operand_steps(base)
    trace = simulate_batch(plan, [(steps[:, s, 0], steps[:, s, 1]) for s in range(len(plan.segments))])
    products = np.stack(extract_products(plan, trace.raw_product), axis=1).tolist() if len(steps) else []
    report = array_report(sc.n, plan, steps.tolist(), sc.tech)
    results = {"h": plan.ctrl.h_str, "v": plan.ctrl.v_str}
    if len(steps) == 1:
        results["products"] = products[0]
        results["raw_product"] = int(trace.raw_product[0])
    else:
        results["steps"] = len(steps)
        results["products"] = products
    return {"command": "multiply", "scenario": sc.to_dict(), "results": results, "cost": report.to_dict()}


def cmd_device(args) -> dict:
    params = load_scenario(args.scenario).device if args.scenario else MemristorParams(
        window_exponent=args.window)
    wave = sine_waveform(args.amplitude, args.frequency, args.dt, args.periods)
    trace = simulate_waveform(params, wave, args.dt, args.x0)
    if args.trace_csv:
        Path(args.trace_csv).write_text(trace.to_csv())
    return {
        "command": "device",
        "scenario": {"device": asdict(params),
                     "amplitude": args.amplitude, "frequency": args.frequency, "dt": args.dt,
                     "periods": args.periods, "x0": args.x0},
        "results": {
            "samples": len(trace),
            "x_min": float(trace.x.min()),
            "x_max": float(trace.x.max()),
            "m_min": float(trace.m.min()),
            "m_max": float(trace.m.max()),
            "q_final": float(trace.q[-1]),
            "phi_final": float(trace.phi[-1]),
            "flux_charge_residual": verify_flux_charge(trace, params),
        },
    }


def _bench(name, runner, args) -> dict:
    tech = TechConstants()
    if args.scenario:
        sc = load_scenario(args.scenario)
        tech = sc.tech
        if args.seed is None:
            args.seed = sc.seed
    if args.seed is None:
        raise UsageError("give --seed, or a --scenario carrying one")
    base = runner([8], args.cycles, args.seed, tech)
    cand = runner([4, 4], args.cycles, args.seed, tech)
    cmp = compare_report(cand, base, name)
    cand.ratios = cmp["ratios"]
    cand.paper_reference_ratios = cmp["paper_reference_ratios"]
    return {
        "command": f"bench-{name}",
        "scenario": {"cycles": args.cycles, "seed": args.seed, "n": 8, "tech": tech.to_dict()},
        "results": {"8": base.to_dict(), "4+4": cand.to_dict()},
        "cost": cand.to_dict(),
        "ratios": cmp["ratios"],
        "paper_reference_ratios": cmp["paper_reference_ratios"],
        "comparison": {k: {"ours": cmp["ratios"][k], "published": v}
                       for k, v in cmp["paper_reference_ratios"].items()},
    }


def cmd_bench_fir(args) -> dict:
    return _bench("fir", bench_fir, args)


def cmd_bench_fft(args) -> dict:
    return _bench("fft", bench_fft, args)


def cmd_report(args) -> dict:
    docs = []
    for path in args.reports:
        try:
            docs.append(json.loads(Path(path).read_text()))
        except json.JSONDecodeError as exc:
            raise ScenarioError(f"{path}: not a structured report ({exc})") from None
    if len(docs) == 1:
        return docs[0]
    fields = CostReport.__dataclass_fields__
    reports = []
    for path, d in zip(args.reports, docs):
        c = d.get("cost", d)
        try:
            reports.append(CostReport(**{k: c[k] for k in fields if k in c}))
        except TypeError:
            raise ScenarioError(f"{path}: no cost report with delay_s/energy_j/avg_power_w/area_units/gate_count") from None
    cmp = compare_report(reports[1], reports[0], args.scenario_name)
    return {"command": "report", "baseline": args.reports[0], "candidate": args.reports[1], **cmp,
            "reference_designs": REFERENCE_DESIGNS if args.scenario_name == "area_32bit" else None}


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="reconfmult", description="Memristor-CMOS reconfigurable multiplier simulator.",
                epilog=EPILOG, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, fmt_default):
        sp.add_argument("--format", choices=FORMATS, default=fmt_default)
        sp.add_argument("--output", help="write the document here instead of stdout")

    sp = sub.add_parser("plan", help="print control vectors and enabled mask", epilog=EPILOG,
                        formatter_class=argparse.RawDescriptionHelpFormatter)
    sp.add_argument("--n", type=int)
    sp.add_argument("--widths", type=_int_list)
    sp.add_argument("--scenario")
    common(sp, "human")
    sp.set_defaults(func=cmd_plan)

    sp = sub.add_parser("multiply", help="run the array on operands", epilog=EPILOG,
                        formatter_class=argparse.RawDescriptionHelpFormatter)
    sp.add_argument("--n", type=int)
    sp.add_argument("--widths", type=_int_list)
    sp.add_argument("--pairs", type=_pairs, help="one AxB per segment, e.g. 21x19,5x6")
    sp.add_argument("--seed", type=int)
    sp.add_argument("--scenario")
    common(sp, "structured")
    sp.set_defaults(func=cmd_multiply)

    sp = sub.add_parser("device", help="simulate one memristor under a sine drive", epilog=EPILOG,
                        formatter_class=argparse.RawDescriptionHelpFormatter)
    sp.add_argument("--amplitude", type=float, default=1.0)
    sp.add_argument("--frequency", type=float, default=1.0)
    sp.add_argument("--dt", type=float, default=1e-3)
    sp.add_argument("--periods", type=float, default=1.0)
    sp.add_argument("--x0", type=float, default=0.1)
    sp.add_argument("--window", type=int, default=0)
    sp.add_argument("--trace-csv", help="write the trace (t,v,i,q,phi,x,m) here")
    sp.add_argument("--scenario", help="take device parameters from this scenario")
    common(sp, "structured")
    sp.set_defaults(func=cmd_device)

    for name, func in (("bench-fir", cmd_bench_fir), ("bench-fft", cmd_bench_fft)):
        sp = sub.add_parser(name, help="compare the 4+4 and 8-bit configurations", epilog=EPILOG,
                            formatter_class=argparse.RawDescriptionHelpFormatter)
        sp.add_argument("--cycles", type=int, default=1000)
        sp.add_argument("--seed", type=int)
        sp.add_argument("--scenario", help="take tech constants (and seed) from this scenario")
        common(sp, "structured")
        sp.set_defaults(func=func)

    sp = sub.add_parser("report", help="render a saved report, or compare candidate against baseline",
                        epilog=EPILOG, formatter_class=argparse.RawDescriptionHelpFormatter)
    sp.add_argument("reports", nargs="+", metavar="REPORT", help="baseline first when comparing")
    sp.add_argument("--scenario-name", choices=sorted(PUBLISHED_RATIOS), help="attach published ratios")
    common(sp, "human")
    sp.set_defaults(func=cmd_report)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        try:
            args = parser.parse_args(argv)
        except SystemExit as exc:  # --help / --version
            return int(exc.code or 0)
        if getattr(args, "cycles", 1) is not None and getattr(args, "cycles", 1) <= 0:
            raise UsageError("--cycles must be positive")
        if args.command == "report" and len(args.reports) > 2:
            raise UsageError("report takes one file to render or two to compare")
        doc = args.func(args)
        if args.command == "plan" and args.format == "human":
            text = _render_plan(doc)
        else:
            text = emit_report(doc, args.format)
    except UsageError as exc:
        print(f"reconfmult: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValidationError, ValueError, FileNotFoundError) as exc:
        print(f"reconfmult: validation error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except Exception as exc:  # noqa: BLE001
        print(f"reconfmult: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
