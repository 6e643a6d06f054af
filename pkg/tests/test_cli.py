"""End-to-end command line behaviour and the exit-code contract."""

import json

import numpy as np
import pytest

from periph import cli
from periph import serialize as ser
from periph.channel import KrausChannel
from periph.errors import ToleranceConflictError

from conftest import crandn, dephasing_channel, random_unital_channel

PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
PAULI_Z = np.diag([1.0, -1.0]).astype(complex)


def write_channel(tmp_path, c, name="c.json"):
    path = tmp_path / name
    ser.dump_channel(c, path)
    return str(path)


def write_matrix(tmp_path, m, name):
    path = tmp_path / name
    path.write_text(json.dumps({"matrix": ser.matrix_to_pairs(m)}))
    return str(path)


def run(capsys, argv):
    code = cli.main(argv)
    out = capsys.readouterr().out
    return code, out


def test_spectrum_identity_channel(tmp_path, capsys):
    path = write_channel(tmp_path, KrausChannel([np.eye(3)], label="id3"))
    code, out = run(capsys, ["spectrum", path])
    assert code == 0
    obj = json.loads(out)
    assert obj["all_pass"] is True
    eigs = obj["data"]["eigenvalues"]
    assert len(eigs) == 1
    assert eigs[0]["algebraic_multiplicity"] == 9
    assert obj["data"]["span_dim"] == 9


def test_spectrum_weyl_includes_third_roots(tmp_path, capsys):
    code, out = run(capsys, ["example", "weyl", "--d", "3", "--n", "1"])
    assert code == 0
    path = tmp_path / "w.json"
    path.write_text(out)
    code, out = run(capsys, ["spectrum", str(path)])
    assert code == 0
    vals = [complex(*e["value"]) for e in json.loads(out)["data"]["eigenvalues"]]
    w = np.exp(2j * np.pi / 3)
    assert min(abs(v - w) for v in vals) < 1e-10
    assert min(abs(v - np.conj(w)) for v in vals) < 1e-10


def test_malformed_json_exits_2(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{oops")
    code, _ = run(capsys, ["spectrum", str(bad)])
    assert code == 2


def test_non_unital_channel_exits_2(tmp_path, capsys):
    # parses fine but fails the unitality contract for channel files
    obj = ser.channel_to_json(KrausChannel([np.eye(2)], label="bad"))
    obj["kraus"] = [ser.matrix_to_pairs(0.5 * np.eye(2))]
    path = tmp_path / "nonunital.json"
    path.write_text(json.dumps(obj))
    code, _ = run(capsys, ["spectrum", str(path)])
    assert code == 2


def test_verify_dephasing_all_suites(tmp_path, capsys):
    path = write_channel(tmp_path, dephasing_channel())
    code, out = run(capsys, ["verify", path, "--suite", "all", "--seed", "7",
                             "--trials", "6"])
    assert code == 0
    obj = json.loads(out)
    assert obj["all_pass"] is True
    prefixes = {c["name"].split(".")[0] for c in obj["checks"]}
    assert {"cstar", "automorphism", "dilation"} <= prefixes


def test_verify_cap_exit_3(tmp_path, capsys):
    path = write_channel(tmp_path, random_unital_channel(3, 3, seed=0))
    code, _ = run(capsys, ["verify", path, "--suite", "dilation",
                           "--depth", "8"])
    assert code == 3


def test_verify_deterministic_modulo_timings(tmp_path, capsys):
    path = write_channel(tmp_path, dephasing_channel())
    argv = ["verify", path, "--suite", "cstar", "--seed", "3", "--trials", "5"]
    _, out1 = run(capsys, argv)
    _, out2 = run(capsys, argv)
    a, b = json.loads(out1), json.loads(out2)
    a.pop("timings")
    b.pop("timings")
    assert a == b


def test_product_identity_channel_all_methods_agree(tmp_path, capsys):
    path = write_channel(tmp_path, KrausChannel([np.eye(2)], label="id2"))
    rng = np.random.default_rng(0)
    xp = write_matrix(tmp_path, crandn(rng, 2, 2), "x.json")
    yp = write_matrix(tmp_path, crandn(rng, 2, 2), "y.json")
    code, out = run(capsys, ["product", path, xp, yp])
    assert code == 0
    obj = json.loads(out)
    assert obj["all_pass"] is True
    for value in obj["data"]["agreement"].values():
        assert value < 1e-10


def test_product_pauli_frozen(tmp_path, capsys):
    path = write_channel(tmp_path, KrausChannel([PAULI_Z], label="uZ"))
    xp = write_matrix(tmp_path, PAULI_X, "x.json")
    for method in ["spectral", "cesaro", "dilation", "limit"]:
        code, out = run(capsys, ["product", path, xp, xp,
                                 "--method", method])
        assert code == 0
        rows = json.loads(out)["data"]["product"]
        got = np.array([[complex(re, im) for re, im in row] for row in rows])
        assert np.linalg.norm(got - np.eye(2)) < 1e-9


def test_product_outside_span_exits_5(tmp_path, capsys):
    path = write_channel(tmp_path, dephasing_channel())
    xp = write_matrix(tmp_path, PAULI_X, "x.json")
    code, _ = run(capsys, ["product", path, xp, xp])
    assert code == 5


def test_tolerance_conflict_exits_4(tmp_path, capsys, monkeypatch):
    def boom(path):
        raise ToleranceConflictError("two peripheral eigenvalues both match")
    monkeypatch.setattr(cli.ser, "load_channel", boom)
    code, _ = run(capsys, ["spectrum", "whatever.json"])
    assert code == 4


def test_example_unitary_dim2(capsys):
    code, out = run(capsys, ["example", "unitary", "--diag", "1,i"])
    assert code == 0
    obj = json.loads(out)
    assert obj["dim"] == 2
    c = ser.channel_from_json(obj)
    assert c.dim == 2


def test_example_weyl_d3_n2(capsys):
    code, out = run(capsys, ["example", "weyl", "--d", "3", "--n", "2",
                             "--probs", "0.5,0.5"])
    assert code == 0
    obj = json.loads(out)
    assert obj["dim"] == 9
    w = complex(*obj["metadata"]["eigenvalue"])
    assert abs(w - np.exp(2j * np.pi / 3)) < 1e-12


def test_example_group_walk(capsys):
    code, out = run(capsys, ["example", "group-walk", "--group", "Z2xZ2",
                             "--mu", "1:1.0"])
    assert code == 0
    obj = json.loads(out)
    assert obj["dim"] == 4
    assert obj["metadata"]["group"] == "Z2xZ2"


def test_example_toeplitz_csv(capsys):
    code, out = run(capsys, ["example", "toeplitz-demo", "--M", "64,128,256",
                             "--symbol", "1:1,-1:1"])
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "M,r,defect"
    assert len(lines) == 4
    last = lines[-1].split(",")
    assert int(last[0]) == 256
    assert float(last[1]) >= 0.95


def test_example_unknown_name_exits_2(capsys):
    with pytest.raises(SystemExit) as exc_info:
        cli.main(["example", "fractal"])
    assert exc_info.value.code == 2
