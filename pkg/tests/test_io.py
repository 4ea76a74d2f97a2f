import numpy as np
import pytest

from animc import io
from animc.errors import ValidationError
from animc.perturb import apply_missing, synth_generate


def test_fmt_float():
    assert io.fmt_float(1) == "1.0"
    assert io.fmt_float(0.1) == "0.1"
    assert io.fmt_float(1e-20) == "1e-20"
    assert float(io.fmt_float(np.pi)) == np.pi
    with pytest.raises(ValidationError):
        io.fmt_float(float("nan"))


def test_dataset_round_trip_bytes(tmp_path):
    ds = apply_missing(synth_generate(n=30, c=3, seed=2), 0.3, seed=1)
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    io.write_dataset(a, ds)
    back = io.read_dataset(a)
    io.write_dataset(b, back)
    assert a.read_bytes() == b.read_bytes()
    for X, Y in zip(ds.Xs, back.Xs):
        np.testing.assert_array_equal(X, Y)
    np.testing.assert_array_equal(ds.labels, back.labels)


def test_dataset_validation(tmp_path):
    ds = synth_generate(n=6, c=2, dims=(2, 2), seed=0)
    doc = io.dataset_to_doc(ds)
    doc["views"][0]["present"][0] = 0
    with pytest.raises(ValidationError, match="zero columns"):
        io.dataset_from_doc(doc)
    doc = io.dataset_to_doc(ds)
    doc["views"][1]["d"] = 3
    with pytest.raises(ValidationError, match="shape"):
        io.dataset_from_doc(doc)
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ValidationError):
        io.read_dataset(bad)
    with pytest.raises(ValidationError):
        io.read_dataset(tmp_path / "missing.json")


def test_state_round_trip(tmp_path, rng):
    V = rng.uniform(size=(5, 2))
    U = [rng.standard_normal((3, 2)), rng.standard_normal((4, 2))]
    A = [rng.standard_normal((3, 2)), rng.standard_normal((4, 2))]
    p = tmp_path / "s.json"
    io.write_state(p, "animc", V, U, A, w=[0.3, 0.7], seed=4)
    st = io.read_state(p)
    np.testing.assert_array_equal(st["V"], V)
    for x, y in zip(st["U"] + st["A"], U + A):
        np.testing.assert_array_equal(x, y)
    assert st["w"] == [0.3, 0.7] and st["seed"] == 4
    io.write_state(p, "rmf", V, U[:1])
    assert io.read_state(p)["A"] is None


def test_trace_csv(tmp_path):
    header, rows = io.trace_rows([0, 1], [3.0, 2.0], None, [[0.5, 0.5], [0.4, 0.6]], 2)
    p = tmp_path / "t.csv"
    io.write_csv(p, header, rows)
    assert p.read_text().splitlines() == ["iter,objective,r_objective,w_1,w_2",
                                          "0,3.0,,0.5,0.5", "1,2.0,,0.4,0.6"]
    assert io.read_csv(p)[1]["w_2"] == "0.6"
