"""Scenario files, workload CSVs and report rendering.

A scenario is a TOML document::

    n = 8
    widths = [5, 3]
    seed = 7
    format = "structured"

    [workload]
    source = "inline"          # inline | csv | random
    pairs = [[21, 19], [5, 6]]

    [device]
    r_on = 100.0

    [tech]
    frequency = 1e8
    [tech.energy_per_toggle]
    MR_NAND = 6e-15

Everything except ``n`` and ``widths`` has a default, and unknown keys are
errors.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Any, Sequence

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

import numpy as np

from .array import plan_partitions
from .cost import TechConstants
from .device import MemristorParams, params_from_mapping
from .errors import OperandOverflow, ValidationError

FORMATS = ("human", "structured", "csv")
SOURCES = ("inline", "csv", "random")
TOP_KEYS = {"n", "widths", "seed", "format", "workload", "device", "tech"}
WORKLOAD_KEYS = {"source", "pairs", "path", "count"}


class ScenarioError(ValidationError):
    pass


@dataclass
class Workload:
    source: str = "random"
    pairs: list = field(default_factory=list)
    path: str | None = None
    count: int = 1000


@dataclass
class Scenario:
    n: int
    widths: list[int]
    seed: int = 0
    format: str = "structured"
    workload: Workload = field(default_factory=Workload)
    device: MemristorParams = field(default_factory=MemristorParams)
    tech: TechConstants = field(default_factory=TechConstants)

    def __post_init__(self):
        # gate delays depend on the device, so tech always follows [device]
        if self.tech.mr_params != self.device:
            self.tech = replace(self.tech, mr_params=self.device)

    def validate(self) -> None:
        plan = plan_partitions(self.n, self.widths)
        if self.format not in FORMATS:
            raise ScenarioError(f"format: expected one of {FORMATS}, got {self.format!r}")
        wl = self.workload
        if wl.source not in SOURCES:
            raise ScenarioError(f"workload.source: expected one of {SOURCES}, got {wl.source!r}")
        if wl.source == "inline":
            if len(wl.pairs) != len(plan.segments):
                raise ScenarioError(f"workload.pairs: {len(plan.segments)} pair(s) needed, got {len(wl.pairs)}")
            for seg, (a, b) in zip(plan.segments, wl.pairs):
                if not (0 <= a < 1 << seg.width and 0 <= b < 1 << seg.width):
                    raise OperandOverflow(f"workload.pairs: ({a}, {b}) does not fit {seg.width} bits")
        if wl.source == "csv" and not wl.path:
            raise ScenarioError("workload.path: required when source = 'csv'")
        if wl.count < 0:
            raise ScenarioError("workload.count must be non-negative")

    def operand_steps(self, base: Path | None = None) -> np.ndarray:
        """Operand pairs as an int array of shape (steps, segments, 2)."""
        plan = plan_partitions(self.n, self.widths)
        segs = len(plan.segments)
        wl = self.workload
        if wl.source == "inline":
            steps = np.array([wl.pairs], dtype=np.int64)
        elif wl.source == "csv":
            path = Path(wl.path)
            if base is not None and not path.is_absolute():
                path = base / path
            steps = read_operand_csv(path.read_text(), segs)
        else:
            rng = np.random.default_rng(self.seed)
            cols = [rng.integers(0, 1 << s.width, size=(wl.count, 2)) for s in plan.segments]
            steps = np.stack(cols, axis=1) if wl.count else np.zeros((0, segs, 2), dtype=np.int64)
        for k, seg in enumerate(plan.segments):
            if steps.size and (steps[:, k].min() < 0 or steps[:, k].max() >= 1 << seg.width):
                raise OperandOverflow(f"workload operands for segment {k} exceed {seg.width} bits")
        return steps

    def to_dict(self) -> dict:
        wl = {"source": self.workload.source}
        if self.workload.source == "inline":
            wl["pairs"] = [list(p) for p in self.workload.pairs]
        if self.workload.path is not None:
            wl["path"] = self.workload.path
        if self.workload.source == "random":
            wl["count"] = self.workload.count
        return {
            "n": self.n,
            "widths": list(self.widths),
            "seed": self.seed,
            "format": self.format,
            "workload": wl,
            "device": asdict(self.device),
            "tech": self.tech.to_dict(),
        }


def _check_keys(section: str, table: dict, allowed: set) -> None:
    unknown = set(table) - allowed
    if unknown:
        where = f"[{section}] " if section else ""
        raise ScenarioError(f"{where}unknown key(s): {', '.join(sorted(unknown))}")


def scenario_from_mapping(doc: dict) -> Scenario:
    _check_keys("", doc, TOP_KEYS)
    for key in ("n", "widths"):
        if key not in doc:
            raise ScenarioError(f"missing required field '{key}'")
    if not isinstance(doc["n"], int):
        raise ScenarioError(f"n: expected an integer, got {doc['n']!r}")
    if not isinstance(doc["widths"], list) or not all(isinstance(w, int) for w in doc["widths"]):
        raise ScenarioError(f"widths: expected a list of integers, got {doc['widths']!r}")
    wl_doc = doc.get("workload", {})
    _check_keys("workload", wl_doc, WORKLOAD_KEYS)
    workload = Workload(**{k: v for k, v in wl_doc.items()})
    workload.pairs = [tuple(int(x) for x in p) for p in workload.pairs]
    try:
        device = params_from_mapping(doc.get("device", {}))
        tech = TechConstants.from_mapping(doc.get("tech", {}), mr_params=device)
    except ValueError as exc:
        raise ScenarioError(str(exc)) from None
    sc = Scenario(n=doc["n"], widths=list(doc["widths"]), seed=int(doc.get("seed", 0)),
                  format=doc.get("format", "structured"), workload=workload, device=device, tech=tech)
    sc.validate()
    return sc


def parse_scenario(text: str) -> Scenario:
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ScenarioError(f"scenario parse error: {exc}") from None
    return scenario_from_mapping(doc)


def load_scenario(path: str | Path) -> Scenario:
    return parse_scenario(Path(path).read_text())


def _toml_value(v: Any) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, float):
        return repr(v) if math.isfinite(v) else ("inf" if v > 0 else "-inf")
    if isinstance(v, str):
        return json.dumps(v)
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_toml_value(x) for x in v) + "]"
    raise TypeError(f"cannot render {type(v).__name__} as TOML")


def dump_scenario(sc: Scenario) -> str:
    """TOML text that ``parse_scenario`` reads back into an equal scenario."""
    doc = sc.to_dict()
    lines = []

    def table(name, mapping):
        scalars = {k: v for k, v in mapping.items() if not isinstance(v, dict)}
        nested = {k: v for k, v in mapping.items() if isinstance(v, dict)}
        if name:
            lines.append(f"\n[{name}]")
        for k, v in scalars.items():
            lines.append(f"{k} = {_toml_value(v)}")
        for k, v in nested.items():
            table(f"{name}.{k}" if name else k, v)

    table("", doc)
    return "\n".join(lines).lstrip("\n") + "\n"


def read_operand_csv(text: str, segments: int) -> np.ndarray:
    """Operand CSV with header ``a0,b0[,a1,b1]``, one row per step."""
    reader = csv.DictReader(io.StringIO(text))
    want = [f"{c}{k}" for k in range(segments) for c in "ab"]
    if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != want:
        raise ScenarioError(f"operand CSV header must be {','.join(want)}, got {reader.fieldnames}")
    rows = []
    for lineno, row in enumerate(reader, 2):
        try:
            rows.append([int(row[k]) for k in want])
        except (TypeError, ValueError):
            raise ScenarioError(f"operand CSV line {lineno}: expected integers") from None
    return np.array(rows, dtype=np.int64).reshape(len(rows), segments, 2)


def read_sample_csv(text: str) -> list[tuple[int, ...]]:
    """Sample stream CSV: ``k,sign,magnitude`` or ``k,re_sign,re_mag,im_sign,im_mag``.

    Returns signed values (ints, or (re, im) tuples) ordered by ``k``.
    """
    reader = csv.reader(io.StringIO(text))
    header = [h.strip() for h in next(reader, [])]
    real = ["k", "sign", "magnitude"]
    cplx = ["k", "re_sign", "re_mag", "im_sign", "im_mag"]
    if header not in (real, cplx):
        raise ScenarioError(f"sample CSV header must be {','.join(real)} or {','.join(cplx)}")
    out = []
    for lineno, row in enumerate(reader, 2):
        try:
            vals = [int(x) for x in row]
        except ValueError:
            raise ScenarioError(f"sample CSV line {lineno}: expected integers") from None
        signs = vals[1::2]
        if any(s not in (1, -1) for s in signs):
            raise ScenarioError(f"sample CSV line {lineno}: sign must be 1 or -1")
        if header == real:
            out.append((vals[0], vals[1] * vals[2]))
        else:
            out.append((vals[0], (vals[1] * vals[2], vals[3] * vals[4])))
    return [v for _, v in sorted(out, key=lambda kv: kv[0])]


def write_sample_csv(values: Sequence) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    cplx = bool(values) and isinstance(values[0], (tuple, list, complex))
    w.writerow(["k", "re_sign", "re_mag", "im_sign", "im_mag"] if cplx else ["k", "sign", "magnitude"])
    for k, v in enumerate(values):
        parts = (v.real, v.imag) if isinstance(v, complex) else (v if cplx else (v,))
        row = [k]
        for p in parts:
            p = int(p)
            row += [-1 if p < 0 else 1, abs(p)]
        w.writerow(row)
    return buf.getvalue()


def _flatten(prefix: str, value, out: dict) -> None:
    if isinstance(value, dict):
        for k in sorted(value):
            _flatten(f"{prefix}.{k}" if prefix else str(k), value[k], out)
    elif isinstance(value, (list, tuple)) and value and isinstance(value[0], (dict, list, tuple)):
        for k, v in enumerate(value):
            _flatten(f"{prefix}.{k}", v, out)
    else:
        out[prefix] = value


def emit_report(results: dict, fmt: str = "structured") -> str:
    """Render one run document.  ``structured`` is canonical JSON (sorted keys)."""
    if fmt == "structured":
        return json.dumps(results, sort_keys=True, indent=2, default=_json_default) + "\n"
    flat: dict = {}
    _flatten("", json.loads(json.dumps(results, default=_json_default)), flat)
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["field", "value"])
        for k, v in flat.items():
            w.writerow([k, json.dumps(v) if isinstance(v, (list, dict)) else v])
        return buf.getvalue()
    if fmt == "human":
        width = max((len(k) for k in flat), default=0)
        return "".join(f"{k:<{width}}  {v}\n" for k, v in flat.items())
    raise ScenarioError(f"format: expected one of {FORMATS}, got {fmt!r}")


def _json_default(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def sweep_csv(rows: Sequence[dict]) -> str:
    """CSV with one row per report, columns from the union of flattened fields."""
    flat_rows = []
    for r in rows:
        flat: dict = {}
        _flatten("", json.loads(json.dumps(r, default=_json_default)), flat)
        flat_rows.append(flat)
    cols = sorted({k for r in flat_rows for k in r})
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
    w.writeheader()
    for r in flat_rows:
        w.writerow(r)
    return buf.getvalue()
