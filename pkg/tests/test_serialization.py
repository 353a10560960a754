"""Tests for deterministic JSON/CSV serialization and fixture encoding."""

import io
import json
import math

import numpy as np
import pytest

import waveprop as wp
from waveprop import serialization as ser


def test_matrix_roundtrip_complex():
    m = np.array([[1.0 + 2.0j, -0.5], [0.25j, 3.0]])
    back = ser.matrix_from_json(ser.matrix_to_json(m), "m")
    assert np.array_equal(back, m)


def test_vector_roundtrip():
    v = np.array([1.0, -2.5j, 0.125 + 0.25j])
    back = ser.vector_from_json(ser.vector_to_json(v), "v")
    assert np.array_equal(back, v)


def test_matrix_errors_carry_location():
    obj = ser.matrix_to_json(np.eye(3))
    obj["rows"][2][1] = "oops"
    with pytest.raises(ValueError, match=r"fix\.rows\[2\]\[1\]"):
        ser.matrix_from_json(obj, "fix")


def test_vector_errors_carry_location():
    obj = ser.vector_to_json(np.ones(3))
    obj["entries"][1] = [1.0]
    with pytest.raises(ValueError, match=r"vec\.entries\[1\]"):
        ser.vector_from_json(obj, "vec")


def test_field_json_roundtrip():
    f = wp.gaussian_bump((8, 8), (2 * math.pi, 4 * math.pi), (1.0, 2.0), 0.5)
    back = ser.field_from_json(ser.field_to_json(f, t=0.25))
    assert back.lengths == f.lengths
    assert back.origins == f.origins
    assert np.array_equal(back.values, f.values)


def test_field_csv_layout():
    f = wp.gaussian_bump((4, 4), (1.0, 1.0), (0.5, 0.5), 0.2)
    text = ser.csv_text(ser.field_to_csv, f, t=0.5)
    lines = text.strip().splitlines()
    assert lines[0] == "index,x0,x1,re,im,t"
    assert len(lines) == 17
    cells = lines[1].split(",")
    assert cells[0] == "0"
    assert float(cells[-1]) == 0.5
    # repr floats parse back exactly
    assert float(cells[3]) == f.values[0, 0].real


def test_series_csv_writer():
    buf = io.StringIO()
    ser.series_to_csv(["m", "error"], [(8, 0.5), (16, 0.25)], buf)
    assert buf.getvalue().splitlines() == ["m,error", "8,0.5", "16,0.25"]


def test_rule_csv_writer():
    rule = wp.build_sphere_rule(2, 4)
    text = ser.csv_text(ser.rule_to_csv, rule)
    lines = text.strip().splitlines()
    assert lines[0] == "w1,w2,weight"
    assert len(lines) == len(rule.weights) + 1


def test_dump_json_is_deterministic_and_sorted():
    obj = {"b": 1.5, "a": [1.0 / 3.0], "c": {"z": 1, "y": 2}}
    one = ser.dump_json(obj)
    two = ser.dump_json(obj)
    assert one == two
    assert one.endswith("\n")
    assert one.index('"a"') < one.index('"b"') < one.index('"c"')
    # shortest-roundtrip float formatting
    assert "0.3333333333333333" in one


def test_dump_json_writes_to_path(tmp_path):
    path = tmp_path / "out.json"
    ser.dump_json({"x": 1}, path)
    assert json.loads(path.read_text()) == {"x": 1}


def test_load_json_file_reports_line_and_column(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{"a": \n nope}')
    with pytest.raises(ValueError, match="line 2"):
        ser.load_json_file(path)


def test_hermitian_pair_fixture_roundtrip():
    fx = ser.hermitian_pair_fixture(4, seed=7)
    assert fx["kind"] == "hermitian-pair"
    decoded = ser.fixture_from_json(fx, "fx")
    a, b, h = decoded["a"], decoded["b"], decoded["h"]
    assert np.allclose(a, a.conj().T)
    assert np.allclose(b, b.conj().T)
    assert wp.operator_norm(a) == pytest.approx(1.0, rel=1e-12)
    assert h.shape == (4,)
    # same seed reproduces the same fixture
    again = ser.hermitian_pair_fixture(4, seed=7)
    assert ser.dump_json(fx) == ser.dump_json(again)


def test_commuting_family_fixture_is_diagonal():
    fx = ser.commuting_family_fixture(3, 4, seed=2)
    decoded = ser.fixture_from_json(fx, "fx")
    ops = decoded["matrices"]
    assert len(ops) == 3
    for op in ops:
        assert np.allclose(op, np.diag(np.diag(op)))
        assert np.abs(np.diag(op)).max() <= 1.0


def test_fixture_unknown_kind_rejected():
    with pytest.raises(ValueError, match="kind"):
        ser.fixture_from_json({"kind": "mystery"}, "fx")


def test_fixture_decoding_reports_nested_location():
    fx = ser.hermitian_pair_fixture(3, seed=1)
    fx["a"]["rows"][0][2] = "bad"
    with pytest.raises(ValueError, match=r"fx\.a\.rows\[0\]\[2\]"):
        ser.fixture_from_json(fx, "fx")
