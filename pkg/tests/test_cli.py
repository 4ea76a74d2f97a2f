import json

import numpy as np
import pytest

from animc import io
from animc.cli import main


@pytest.fixture
def data(tmp_path):
    path = tmp_path / "ds.json"
    assert main(["generate", "--n", "80", "--dims", "12,16", "--seed", "3", "--out", str(path)]) == 0
    return path


def run_json(capsys, argv):
    code = main(argv)
    return code, json.loads(capsys.readouterr().out) if code == 0 else None


def test_generate_deterministic(tmp_path, data):
    again = tmp_path / "again.json"
    main(["generate", "--n", "80", "--dims", "12,16", "--seed", "3", "--out", str(again)])
    assert again.read_bytes() == data.read_bytes()


def test_usage_errors(tmp_path, data):
    assert main([]) == 1
    assert main(["generate", "--views", "3", "--dims", "4,4", "--out", str(tmp_path / "x")]) == 1
    assert main(["fit", "--in", str(data), "--algo", "kmeans", "--out-state", "s"]) == 1
    assert main(["sweep", "--in", str(data), "--per", "", "--out", str(tmp_path / "o")]) == 1


def test_data_errors(tmp_path, data):
    out = tmp_path / "p.json"
    assert main(["perturb", "--in", str(data), "--out", str(out), "--per", "0.95"]) == 2
    assert main(["fit", "--in", str(tmp_path / "nope.json"), "--out-state", str(out)]) == 2


def test_perturb_then_fit_and_eval(tmp_path, data, capsys):
    pert = tmp_path / "p.json"
    assert main(["perturb", "--in", str(data), "--out", str(pert), "--per", "0.3",
                 "--noise-rate", "0.1", "--noise-variance", "0.1", "--seed", "1"]) == 0
    ds = io.read_dataset(pert)
    assert all(80 - g.sum() <= 24 for g in ds.gs)
    state, trace, rep = tmp_path / "s.json", tmp_path / "t.csv", tmp_path / "r.json"
    code, report = run_json(capsys, ["fit", "--in", str(pert), "--out-state", str(state),
                                     "--out-trace", str(trace), "--report", str(rep)])
    assert code == 0
    assert report["metrics"]["acc"] >= 0.9
    assert report["wall_time"] is None
    assert json.loads(rep.read_text()) == report
    assert len(io.read_csv(trace)) == report["iterations"] + 1
    code, ev = run_json(capsys, ["eval", "--state", str(state), "--dataset", str(pert)])
    assert ev == report["metrics"]
    code, both = run_json(capsys, ["eval", "--state", str(state), "--dataset", str(pert),
                                   "--label-mode", "both"])
    assert set(both) == {"kmeans", "argmax"} and both["kmeans"] == ev


def test_fit_freeze_weights_trace(tmp_path, data, capsys):
    trace = tmp_path / "t.csv"
    main(["fit", "--in", str(data), "--freeze-weights", "--out-state", str(tmp_path / "s.json"),
          "--out-trace", str(trace)])
    rows = io.read_csv(trace)
    assert {r["w_1"] for r in rows} == {"0.5"} and {r["w_2"] for r in rows} == {"0.5"}


@pytest.mark.parametrize("algo", ["rmf", "semi-nmf", "semi-rnmf", "naive"])
def test_fit_baselines(tmp_path, data, capsys, algo):
    code, report = run_json(capsys, ["fit", "--in", str(data), "--algo", algo,
                                     "--out-state", str(tmp_path / "s.json")])
    assert code == 0 and report["weights"] is None
    assert 0 <= report["metrics"]["acc"] <= 1


def test_eval_without_labels(tmp_path, data, capsys):
    state = tmp_path / "s.json"
    main(["fit", "--in", str(data), "--out-state", str(state)])
    doc = io.read_document(data)
    del doc["labels"]
    bare = tmp_path / "bare.json"
    io.write_document(bare, doc)
    assert main(["eval", "--state", str(state), "--dataset", str(bare)]) == 2


def test_sweep_reproducible(tmp_path, data):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    argv = ["sweep", "--in", str(data), "--per", "0.1,0.3", "--algos", "animc,naive",
            "--repeats", "2", "--max-iter", "10"]
    assert main(argv + ["--out", str(a)]) == 0
    assert main(argv + ["--out", str(b), "--jobs", "2"]) == 0
    assert a.read_bytes() == b.read_bytes()
    rows = io.read_csv(a)
    assert len(rows) == 2 * 2 * 2 + 2 * 2 * 2
    assert {r["repeat"] for r in rows} == {"0", "1", "mean", "std"}
    assert all(r["status"] == "ok" for r in rows if r["repeat"] in "01")
    assert all(r["seconds"] == "" for r in rows)
    accs = [float(r["acc"]) for r in rows if r["algo"] == "animc" and r["per"] == "0.1"
            and r["repeat"] in "01"]
    mean = next(float(r["acc"]) for r in rows if r["algo"] == "animc" and r["per"] == "0.1"
                and r["repeat"] == "mean")
    assert mean == pytest.approx(np.mean(accs))
