import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reconfmult import cli
from reconfmult.cost import TechConstants
from reconfmult.device import MemristorParams
from reconfmult.errors import OperandOverflow, WidthOverflow
from reconfmult.scenario import (Scenario, ScenarioError, Workload, dump_scenario, emit_report, load_scenario,
                                 parse_scenario, read_operand_csv, read_sample_csv, sweep_csv, write_sample_csv)


def run(capsys, *argv):
    code = cli.run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


# --- scenario files --------------------------------------------------------

def test_minimal_scenario_gets_defaults():
    sc = parse_scenario("n = 8\nwidths = [5, 3]\n")
    assert sc.device == MemristorParams()
    assert sc.tech == TechConstants()
    assert sc.seed == 0 and sc.format == "structured" and sc.workload.source == "random"


def test_round_trip_full_scenario():
    text = """
n = 8
widths = [5, 3]
seed = 12
format = "csv"

[workload]
source = "inline"
pairs = [[21, 19], [5, 6]]

[device]
r_on = 250.0
window_exponent = 2

[tech]
frequency = 2.5e8
[tech.energy_per_toggle]
MR_NAND = 7e-15
"""
    sc = parse_scenario(text)
    assert sc.device.r_on == 250.0 and sc.tech.frequency == 2.5e8
    assert sc.tech.models["MR_NAND"].energy_per_toggle == 7e-15
    again = parse_scenario(dump_scenario(sc))
    assert again == sc
    assert dump_scenario(again) == dump_scenario(sc)


@settings(max_examples=40, deadline=None)
@given(n=st.sampled_from([4, 8, 16]), data=st.data(), seed=st.integers(0, 2**31),
       fmt=st.sampled_from(["human", "structured", "csv"]), r_on=st.floats(1.0, 1e3), freq=st.floats(1e6, 1e9))
def test_round_trip_property(n, data, seed, fmt, r_on, freq):
    w = data.draw(st.integers(1, n))
    widths = [w] if w == n or data.draw(st.booleans()) else [w, n - w]
    sc = Scenario(n=n, widths=widths, seed=seed, format=fmt, device=MemristorParams(r_on=r_on),
                  tech=TechConstants.from_mapping({"frequency": freq}),
                  workload=Workload(source="random", count=data.draw(st.integers(0, 50))))
    assert parse_scenario(dump_scenario(sc)) == sc


@pytest.mark.parametrize("text, field", [
    ("n = 8\nwidths = [8]\nwidht = 3\n", "widht"),
    ("n = 8\nwidths = [8]\n[device]\nron = 1.0\n", "ron"),
    ("n = 8\nwidths = [8]\n[workload]\nsrc = 'random'\n", "src"),
    ("n = 8\nwidths = [8]\n[tech]\nfreq = 1.0\n", "freq"),
    ("n = 8\nwidths = [8]\n[tech.area]\nMR_XOR = 1.0\n", "MR_XOR"),
])
def test_unknown_keys_are_rejected(text, field):
    with pytest.raises(ScenarioError, match=field):
        parse_scenario(text)


def test_parse_errors_cite_location():
    with pytest.raises(ScenarioError, match=r"line \d+"):
        parse_scenario("n = 8\nwidths = [5, 3\nseed = 1\n")
    with pytest.raises(ScenarioError, match="widths"):
        parse_scenario("n = 8\n")


def test_invalid_scenarios():
    with pytest.raises(WidthOverflow):
        parse_scenario("n = 8\nwidths = [5, 4]\n")
    with pytest.raises(OperandOverflow):
        parse_scenario("n = 8\nwidths = [5, 3]\n[workload]\nsource = 'inline'\npairs = [[32, 1], [1, 1]]\n")
    with pytest.raises(ScenarioError):
        parse_scenario("n = 8\nwidths = [8]\nformat = 'xml'\n")
    with pytest.raises(ScenarioError):
        parse_scenario("n = 8\nwidths = [8]\n[workload]\nsource = 'csv'\n")


def test_csv_workload_relative_to_scenario(tmp_path):
    (tmp_path / "ops.csv").write_text("a0,b0,a1,b1\n21,19,5,6\n1,2,3,4\n")
    path = tmp_path / "s.toml"
    path.write_text("n = 8\nwidths = [5, 3]\n[workload]\nsource = 'csv'\npath = 'ops.csv'\n")
    sc = load_scenario(path)
    steps = sc.operand_steps(tmp_path)
    assert steps.tolist() == [[[21, 19], [5, 6]], [[1, 2], [3, 4]]]


def test_random_workload_is_seeded():
    sc = parse_scenario("n = 8\nwidths = [4, 4]\nseed = 5\n[workload]\ncount = 20\n")
    a, b = sc.operand_steps(), sc.operand_steps()
    assert a.shape == (20, 2, 2) and np.array_equal(a, b)
    assert a.max() < 16


def test_operand_csv_errors():
    with pytest.raises(ScenarioError):
        read_operand_csv("a,b\n1,2\n", 1)
    with pytest.raises(ScenarioError, match="line 3"):
        read_operand_csv("a0,b0\n1,2\nx,3\n", 1)


def test_sample_csv_round_trip():
    real = [5, -3, 0, 255]
    assert read_sample_csv(write_sample_csv(real)) == real
    cplx = [(1, -2), (-7, 0)]
    assert read_sample_csv(write_sample_csv(cplx)) == cplx
    assert read_sample_csv("k,sign,magnitude\n1,-1,4\n0,1,2\n") == [2, -4]
    with pytest.raises(ScenarioError):
        read_sample_csv("k,sign,magnitude\n0,0,2\n")


def test_emit_formats():
    doc = {"b": 1, "a": {"x": [1, 2], "y": np.float64(0.5)}}
    structured = emit_report(doc, "structured")
    assert json.loads(structured) == {"a": {"x": [1, 2], "y": 0.5}, "b": 1}
    assert structured.index('"a"') < structured.index('"b"')
    assert emit_report(doc, "csv").splitlines() == ["field,value", 'a.x,"[1, 2]"', "a.y,0.5", "b,1"]
    assert "a.y  0.5" in emit_report(doc, "human")
    with pytest.raises(ScenarioError):
        emit_report(doc, "yaml")
    assert sweep_csv([{"x": 1}, {"x": 2, "y": 3}]).splitlines() == ["x,y", "1,", "2,3"]


# --- command line ----------------------------------------------------------

def test_cli_plan(capsys):
    code, out, _ = run(capsys, "plan", "--n", "8", "--widths", "5,3")
    assert code == 0
    assert "h=11100000 v=00011111" in out
    assert "  111....." in out and "  ...11111" in out


def test_cli_multiply(capsys):
    code, out, _ = run(capsys, "multiply", "--n", "8", "--widths", "5,3", "--pairs", "21x19,5x6")
    assert code == 0
    doc = json.loads(out)
    assert doc["results"]["products"] == [399, 30]
    assert set(doc) >= {"scenario", "results", "cost"}
    assert doc["scenario"]["device"]["r_on"] == 100.0


def test_cli_unsupported_partitioning(capsys):
    code, out, err = run(capsys, "plan", "--n", "8", "--widths", "3,3,2")
    assert code == cli.EXIT_VALIDATION == 3
    assert out == ""
    assert "UnsupportedPartitioning" in err and len(err.strip().splitlines()) == 1


@pytest.mark.parametrize("argv", [
    [], ["frobnicate"], ["plan", "--n", "eight", "--widths", "8"], ["multiply", "--n", "8", "--widths", "8",
                                                                   "--pairs", "3*4"],
    ["plan", "--n", "8"], ["bench-fir"], ["bench-fir", "--seed", "1", "--cycles", "0"],
])
def test_cli_usage_errors(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == cli.EXIT_USAGE == 2
    assert out == "" and err.startswith("reconfmult: usage error")


def test_cli_validation_errors(capsys, tmp_path):
    code, out, err = run(capsys, "multiply", "--n", "8", "--widths", "5,3", "--pairs", "40x1,1x1")
    assert code == 3 and "OperandOverflow" in err and out == ""
    bad = tmp_path / "bad.toml"
    bad.write_text("n = 8\nwidths = [6, 3]\n")
    code, out, err = run(capsys, "multiply", "--scenario", str(bad), "--output", str(tmp_path / "o.json"))
    assert code == 3 and "WidthOverflow" in err
    assert not (tmp_path / "o.json").exists()
    code, _, err = run(capsys, "plan", "--scenario", str(tmp_path / "missing.toml"))
    assert code == 3


def test_cli_internal_error(capsys, monkeypatch):
    def boom(args):
        raise RuntimeError("kaput")
    monkeypatch.setattr(cli, "cmd_plan", boom)
    code, out, err = run(capsys, "plan", "--n", "8", "--widths", "8")
    assert code == cli.EXIT_INTERNAL == 4
    assert "RuntimeError" in err


def test_cli_help_documents_exit_codes(capsys):
    code, out, _ = run(capsys, "--help")
    assert code == 0
    for c in ("0  success", "2  usage", "3  validation", "4  internal"):
        assert c in out


def test_cli_minimal_scenario_echoes_defaults(capsys, tmp_path):
    path = tmp_path / "s.toml"
    path.write_text("n = 8\nwidths = [4, 4]\n[workload]\ncount = 10\n")
    code, out, _ = run(capsys, "multiply", "--scenario", str(path))
    doc = json.loads(out)
    assert code == 0
    assert doc["scenario"]["tech"] == TechConstants().to_dict()
    assert doc["results"]["steps"] == 10


@pytest.mark.parametrize("cmd", ["bench-fir", "bench-fft"])
def test_cli_bench_is_byte_identical(capsys, tmp_path, cmd):
    outs = []
    for k in range(2):
        target = tmp_path / f"{k}.json"
        assert cli.run([cmd, "--seed", "4", "--cycles", "60", "--output", str(target)]) == 0
        outs.append(target.read_bytes())
    assert outs[0] == outs[1]
    doc = json.loads(outs[0])
    assert set(doc["results"]) == {"8", "4+4"}
    assert doc["comparison"]["delay"]["published"] == doc["paper_reference_ratios"]["delay"]


def test_cli_bench_seed_from_scenario(capsys, tmp_path):
    path = tmp_path / "s.toml"
    path.write_text("n = 8\nwidths = [8]\nseed = 4\n")
    code, via_scenario, _ = run(capsys, "bench-fir", "--scenario", str(path), "--cycles", "30")
    code2, via_flag, _ = run(capsys, "bench-fir", "--seed", "4", "--cycles", "30")
    assert code == code2 == 0
    assert json.loads(via_scenario)["ratios"] == json.loads(via_flag)["ratios"]


def test_cli_device_and_trace(capsys, tmp_path):
    trace = tmp_path / "t.csv"
    code, out, _ = run(capsys, "device", "--dt", "1e-3", "--trace-csv", str(trace))
    assert code == 0
    doc = json.loads(out)
    assert 0 <= doc["results"]["x_min"] <= doc["results"]["x_max"] <= 1
    assert trace.read_text().splitlines()[0] == "t,v,i,q,phi,x,m"


def test_cli_report_compare(capsys, tmp_path):
    base, cand = tmp_path / "b.json", tmp_path / "c.json"
    cli.run(["multiply", "--n", "8", "--widths", "8", "--pairs", "200x100", "--output", str(base)])
    cli.run(["multiply", "--n", "8", "--widths", "4,4", "--pairs", "12x10,3x9", "--output", str(cand)])
    capsys.readouterr()
    code, out, _ = run(capsys, "report", str(base), str(cand), "--format", "structured", "--scenario-name", "fir")
    assert code == 0
    doc = json.loads(out)
    assert doc["ratios"]["delay"] < 1
    assert doc["paper_reference_ratios"]["delay"] == 0.70
    code, out, _ = run(capsys, "report", str(base), "--format", "structured")
    assert json.loads(out) == json.loads(base.read_text())
    junk = tmp_path / "junk.json"
    junk.write_text("not json")
    assert run(capsys, "report", str(junk))[0] == 3
