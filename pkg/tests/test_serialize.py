"""JSON wire formats for channels, matrices, and verification reports."""

import json

import numpy as np
import pytest

from periph import serialize as ser
from periph.errors import ChannelFormatError
from periph.reporting import VerificationReport

from conftest import random_unital_channel


def test_complex_pairs_frozen():
    assert ser.complex_to_pair(1 - 2j) == [1.0, -2.0]
    rows = ser.matrix_to_pairs(np.array([[1j]]))
    assert rows == [[[0.0, 1.0]]]


def test_channel_roundtrip_bit_exact():
    c = random_unital_channel(3, 2, seed=42, label="rt")
    obj = ser.channel_to_json(c)
    back = ser.channel_from_json(obj)
    assert back.dim == 3
    assert back.label == "rt"
    for k1, k2 in zip(c.kraus, back.kraus):
        assert np.array_equal(k1, k2)
    # survives an actual JSON text pass
    back2 = ser.channel_from_json(json.loads(json.dumps(obj)))
    for k1, k2 in zip(c.kraus, back2.kraus):
        assert np.array_equal(k1, k2)


def test_file_roundtrip(tmp_path):
    c = random_unital_channel(2, 2, seed=7, label="disk")
    path = tmp_path / "c.json"
    ser.dump_channel(c, path)
    back = ser.load_channel(path)
    for k1, k2 in zip(c.kraus, back.kraus):
        assert np.array_equal(k1, k2)


def test_malformed_inputs_raise():
    good = ser.channel_to_json(random_unital_channel(2, 2, seed=1))
    for mutate in [
        lambda o: o.pop("schema"),
        lambda o: o.update(schema="bogus/9"),
        lambda o: o.update(dim=3),
        lambda o: o.update(kraus=[]),
        lambda o: o["kraus"][0][0].pop(0),
        lambda o: o["kraus"][0][0][0].append(0.0),
        lambda o: o["kraus"][0][0].__setitem__(0, [["x", 0.0], [0.0, 0.0]]),
    ]:
        obj = json.loads(json.dumps(good))
        mutate(obj)
        with pytest.raises(ChannelFormatError):
            ser.channel_from_json(obj)


def test_load_matrix_accepts_both_shapes(tmp_path):
    rows = ser.matrix_to_pairs(np.eye(2))
    p1 = tmp_path / "bare.json"
    p1.write_text(json.dumps(rows))
    p2 = tmp_path / "wrapped.json"
    p2.write_text(json.dumps({"matrix": rows}))
    assert np.array_equal(ser.load_matrix(p1), np.eye(2))
    assert np.array_equal(ser.load_matrix(p2), np.eye(2))


def test_load_channel_missing_file(tmp_path):
    with pytest.raises(ChannelFormatError):
        ser.load_channel(tmp_path / "nope.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ChannelFormatError):
        ser.load_channel(bad)


def test_report_to_json_shape():
    rep = VerificationReport("demo", meta={"k": 1})
    rep.add("alpha", "some identity", 1e-12, 1e-8)
    rep.add_skipped("beta", "another identity", "not reachable here")
    obj = ser.report_to_json(rep, "verify", channel_label="c", seed=3,
                             tolerances={"tol": 1e-8})
    assert obj["command"] == "verify"
    assert obj["seed"] == 3
    assert obj["all_pass"] is True
    names = {c["name"]: c for c in obj["checks"]}
    assert names["alpha"]["pass"] is True
    assert names["alpha"]["paper_anchor"] == "some identity"
    assert names["beta"]["pass"] is None
    assert names["beta"]["value"] is None  # NaN is not valid JSON
    assert names["beta"]["reason"] == "not reachable here"
    text = json.dumps(obj)
    assert "NaN" not in text
    assert json.loads(text) == obj


def test_report_failure_flag():
    rep = VerificationReport("demo")
    rep.add("gamma", "anchor", 1.0, 1e-8)
    obj = ser.report_to_json(rep, "verify")
    assert obj["all_pass"] is False
    assert obj["checks"][0]["pass"] is False


def test_jsonable_handles_numpy_and_complex():
    data = ser.report_to_json(
        VerificationReport("t"), "cmd",
        data={"z": 1 + 2j, "arr": np.arange(3), "f": np.float64(0.5),
              "nested": {"c": np.complex128(3j)}})["data"]
    assert data["z"] == [1.0, 2.0]
    assert data["arr"] == [0, 1, 2]
    assert data["f"] == 0.5
    assert data["nested"]["c"] == [0.0, 3.0]
