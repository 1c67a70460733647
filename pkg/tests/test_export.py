import csv
import io
import json
from pathlib import Path

import pytest

from hybridsim.export import (AxisSyntaxError, PairAxis, TimeAxis, TripleAxis,
                              UnknownVariable, emit_plot_script, export_csv,
                              export_json, make_plot_spec, parse_axes)
from hybridsim.odesolve import Exact
from hybridsim.semantics import Limits
from hybridsim.syntax import desugar, ordered_vars, parse
from hybridsim.trajectory import simulate

GOLDEN = Path(__file__).parent / "golden"


def test_parse_axes_time_groups():
    assert parse_axes("[x,y,v]") == [TimeAxis("x"), TimeAxis("y"), TimeAxis("v")]


def test_parse_axes_pairs():
    assert parse_axes("[(x,y),(x1,y1)]") == [PairAxis("x", "y"), PairAxis("x1", "y1")]


def test_parse_axes_triple():
    assert parse_axes("[(x,y,z)]") == [TripleAxis("x", "y", "z")]


def test_parse_axes_mixed_and_spaces():
    assert parse_axes("[ x , (y, z) ]") == [TimeAxis("x"), PairAxis("y", "z")]


def test_parse_axes_errors():
    with pytest.raises(AxisSyntaxError):
        parse_axes("x,y")
    with pytest.raises(AxisSyntaxError):
        parse_axes("[(x)]")
    with pytest.raises(AxisSyntaxError):
        parse_axes("[(x,y,z,w)]")
    with pytest.raises(AxisSyntaxError):
        parse_axes("[]")


def test_plot_spec_validation():
    limits = Limits()
    variables = ["x", "y", "z"]
    with pytest.raises(AxisSyntaxError):
        make_plot_spec([TripleAxis("x", "y", "z")], "scatter", variables, limits)
    with pytest.raises(AxisSyntaxError):
        make_plot_spec([TimeAxis("x")], "scatter3d", variables, limits)
    with pytest.raises(UnknownVariable):
        make_plot_spec([TimeAxis("nope")], "scatter", variables, limits)
    spec = make_plot_spec([TripleAxis("x", "y", "z")], "scatter3d", variables, limits)
    assert spec.graph_type == "scatter3d"


def _eq1_trajs(dt=1.0, max_time=2.0):
    unit = desugar(parse(
        "p := 0 ; v := 0 ; p' = v, v' = 2 for 1 ; p' = v, v' = -2 for 1"))
    limits = Limits(max_time=max_time, max_iterations=100)
    return unit, limits, simulate(unit, Exact(), limits, dt=dt)


def test_csv_eq1_rows():
    unit, _, trajs = _eq1_trajs()
    out = export_csv(trajs, ordered_vars(unit)).decode()
    rows = out.strip().split("\n")
    assert rows[0] == "label,time,p,v"
    data = [r for r in rows[1:]]
    assert len(data) == 3  # t = 0, 1, 2
    last = data[-1].split(",")
    assert float(last[2]) == 2.0 and float(last[3]) == 0.0


def test_csv_round_trips_bitwise():
    unit, _, trajs = _eq1_trajs(dt=0.3)
    out = export_csv(trajs, ordered_vars(unit)).decode()
    reader = csv.DictReader(io.StringIO(out))
    rows = list(reader)
    samples = trajs[0].samples
    assert len(rows) == len(samples)
    for row, (t, env) in zip(rows, samples):
        assert float(row["time"]) == t
        assert float(row["p"]) == env["p"]
        assert float(row["v"]) == env["v"]


def test_csv_empty():
    assert export_csv([], ["x"]) == b"label,time,x\n"


def test_csv_nine_labels():
    unit = desugar(parse("x := {0,2,4} ; vx := {4,8,12} ; x' = vx for 1"))
    trajs = simulate(unit, Exact(), Limits(max_time=1.0), dt=0.5)
    out = export_csv(trajs, ordered_vars(unit)).decode()
    labels = {line.split(",")[0] for line in out.strip().split("\n")[1:]}
    assert len(labels) == 9


def test_csv_missing_variable_cell_empty():
    unit = desugar(parse("x := 1 ; x' = -1 for 1 ; late := 2"))
    trajs = simulate(unit, Exact(), Limits(max_time=1.0), dt=0.5)
    out = export_csv(trajs, ordered_vars(unit)).decode()
    first_data = out.strip().split("\n")[1].split(",")
    assert first_data[-1] == ""  # 'late' not yet assigned at t=0


def test_json_golden():
    text = "x := 1 ; x' = -1 for 1 ; x := 5 ; x' = -2 for 1 ; x := 1/0"
    unit = desugar(parse(text))
    limits = Limits(max_time=4.0, max_iterations=50)
    trajs = simulate(unit, Exact(), limits, dt=1.0)
    spec = make_plot_spec([TimeAxis("x")], "scatter", ordered_vars(unit), limits)
    doc = export_json(trajs, spec, Exact(), limits, ordered_vars(unit))
    assert doc == (GOLDEN / "jump_error.json").read_bytes()


def test_json_structure():
    unit, limits, trajs = _eq1_trajs()
    spec = make_plot_spec([TimeAxis("p")], "scatter", ordered_vars(unit), limits)
    doc = json.loads(export_json(trajs, spec, Exact(), limits,
                                 ordered_vars(unit)))
    assert doc["schema_version"] == "1"
    assert doc["solver"] == {"mode": "exact"}
    traj = doc["trajectories"][0]
    assert traj["outcome"]["variant"] == "skip"
    kinds = [s["kind"] for s in traj["segments"]]
    assert kinds == ["discrete", "discrete", "continuous", "continuous", "terminal"]
    jumps = [s for s in traj["segments"] if s["kind"] == "discrete"]
    assert jumps[0]["var"] == "p" and jumps[0]["new"] == 0.0


def test_plot_script_golden():
    unit = desugar(parse("x := {0, 1} ; y := 0 ; x' = 1, y' = 2 for 1"))
    limits = Limits(max_time=2.0, max_iterations=50)
    trajs = simulate(unit, Exact(), limits, dt=0.5)
    spec = make_plot_spec(parse_axes("[(x,y)]"), "scatter", ordered_vars(unit),
                          limits)
    script = emit_plot_script(trajs, spec)
    assert script == (GOLDEN / "pair.gp").read_text()


def test_plot_script_3d_uses_splot():
    unit = desugar(parse("x := 0 ; y := 0 ; z := 0 ; x' = 1, y' = 2, z' = 3 for 1"))
    limits = Limits(max_time=1.0, max_iterations=10)
    trajs = simulate(unit, Exact(), limits, dt=0.25)
    spec = make_plot_spec(parse_axes("[(x,y,z)]"), "scatter3d",
                          ordered_vars(unit), limits)
    script = emit_plot_script(trajs, spec)
    assert "splot " in script
    assert "using 1:2:3" in script
    assert "title 'start'" in script and "title 'end'" in script


def test_plot_script_empty_samples_still_wellformed():
    spec = make_plot_spec([TimeAxis("x")], "scatter", ["x"], Limits())
    from hybridsim.trajectory import Trajectory
    from hybridsim.semantics import Skip
    traj = Trajectory(label="empty", samples=[], outcome=Skip({}, 0.0, False))
    script = emit_plot_script([traj], spec)
    opened = script.count("<< EOD")
    closed = sum(1 for line in script.splitlines() if line == "EOD")
    assert opened == closed == 3  # trajectory block + start/end marker blocks
    assert "$g1_t0 << EOD\nEOD" in script  # empty data block
    assert "plot " in script
