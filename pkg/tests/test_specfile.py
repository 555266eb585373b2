"""Spec/control file parsing, JSON emission and CSV serialization."""
import io
import json

import numpy as np
import pytest

from se2control.flow import PiecewiseControl, Trajectory, flow_concat
from se2control.specfile import (
    SpecFileError,
    dump_json,
    format_float,
    load_system_spec,
    parse_control,
    parse_system_spec,
    write_cells_csv,
    write_trajectory_csv,
)
from se2control.system import ReducedSpec


GOOD = {
    "alpha": 1.0,
    "xi": [0.5, -0.25],
    "A": {"lambda": 1.0, "mu": 2.0},
    "eta1": [1.0, 0.0],
    "omega": [-1.0, 1.0],
}


def test_parse_lambda_mu_form():
    spec = parse_system_spec(dict(GOOD))
    assert spec.alpha == 1.0
    assert np.allclose(spec.A, [[1.0, -2.0], [2.0, 1.0]])
    assert spec.omega == (-1.0, 1.0)


def test_parse_matrix_form():
    data = dict(GOOD)
    data["A"] = [[1.0, -2.0], [2.0, 1.0]]
    spec = parse_system_spec(data)
    assert np.allclose(spec.A, [[1.0, -2.0], [2.0, 1.0]])


def test_parse_rejects_noncommuting_matrix():
    data = dict(GOOD)
    data["A"] = [[1.0, 2.0], [2.0, 1.0]]
    with pytest.raises(SpecFileError):
        parse_system_spec(data)


@pytest.mark.parametrize("key", ["alpha", "xi", "A", "eta1", "omega"])
def test_parse_rejects_missing_key(key):
    data = dict(GOOD)
    del data[key]
    with pytest.raises(SpecFileError, match=key):
        parse_system_spec(data)


def test_parse_rejects_unknown_key():
    data = dict(GOOD)
    data["extra"] = 1
    with pytest.raises(SpecFileError):
        parse_system_spec(data)


def test_parse_rejects_bad_omega():
    data = dict(GOOD)
    data["omega"] = [1.0, -1.0]
    with pytest.raises(SpecFileError):
        parse_system_spec(data)


def test_load_reports_json_position(tmp_path):
    p = tmp_path / "broken.json"
    p.write_text('{"alpha": 1.0,\n  "xi": [0, 0],,}\n')
    with pytest.raises(SpecFileError) as exc:
        load_system_spec(str(p))
    assert "broken.json:2" in str(exc.value)


def test_load_round_trip(tmp_path):
    p = tmp_path / "ok.json"
    p.write_text(json.dumps(GOOD))
    spec = load_system_spec(str(p))
    assert spec.eta1[0] == 1.0


def test_parse_control():
    ctrl = parse_control({"segments": [{"duration": 0.5, "u": -0.25}]})
    assert ctrl.segments == [(0.5, -0.25)]


def test_parse_control_rejects_negative_duration():
    with pytest.raises(SpecFileError):
        parse_control({"segments": [{"duration": -0.5, "u": 0.0}]})


def test_format_float_round_trips():
    for x in (1.0 / 3.0, 1e-17, -2.5, 0.1 + 0.2):
        assert float(format_float(x)) == x


def test_dump_json_stable_key_order():
    buf1, buf2 = io.StringIO(), io.StringIO()
    dump_json({"b": 1.5, "a": [np.float64(2.5)], "c": {"y": True, "x": None}}, buf1)
    dump_json({"c": {"x": None, "y": True}, "a": [2.5], "b": 1.5}, buf2)
    assert buf1.getvalue() == buf2.getvalue()
    assert json.loads(buf1.getvalue()) == {"a": [2.5], "b": 1.5, "c": {"x": None, "y": True}}


def test_trajectory_csv_planar_and_group():
    rs = ReducedSpec(lam=0.0, mu=1.0, eta=np.array([1.0, 0.0]), omega=(-2.0, 2.0))
    traj = flow_concat(rs, PiecewiseControl([(0.5, 0.3)]), np.zeros(2))
    buf = io.StringIO()
    write_trajectory_csv(traj, buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "s,t,v_x,v_y,u"
    first = lines[1].split(",")
    assert first[0] == "0" and first[1] == ""  # planar: no angle column value
    assert len(lines) >= 3


def test_cells_csv_header(tmp_path):
    from se2control.reachability import GridConfig, reach_forward

    rs = ReducedSpec(lam=0.0, mu=1.0, eta=np.array([1.0, 0.0]), omega=(-0.5, 0.5))
    cfg = GridConfig((-1.0, 1.0, -1.0, 1.0), 0.1, [-0.5, 0.0, 0.5], 0.1)
    r = reach_forward(rs, np.zeros(2), cfg)
    buf = io.StringIO()
    write_cells_csv(r, buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "i,j,x,y"
    assert len(lines) == r.cell_count + 1
