import json

import pytest

from land.cli import cli_main


@pytest.fixture
def synth_csv(tmp_path):
    p = tmp_path / "s.csv"
    assert cli_main(["synth", "--n", "120", "--irrelevant", "37", "--redundant", "20", "--seed", "7",
                     "--out", str(p)]) == 0
    return p


def test_synth_then_select(tmp_path, synth_csv):
    out, path = tmp_path / "r.json", tmp_path / "p.tsv"
    rc = cli_main(["select", "--input", str(synth_csv), "--m", "10", "--b", "20",
                   "--out", str(out), "--path", str(path)])
    assert rc == 0
    rep = json.loads(out.read_text())
    assert len(rep["selected"]) == 10
    assert list(rep) == ["method", "task", "score_mode", "d", "n", "m", "b", "selected", "names",
                         "steps", "alpha", "f", "dropped", "stop_reason", "metrics"]
    assert rep["metrics"]["reduction_rate"] == 1 - 10 / 60
    assert rep["steps"][0]["lambda"] == 2 * rep["steps"][0]["score_level"]
    rows = path.read_text().splitlines()
    assert rows[0].split("\t")[:3] == ["step", "entered", "name"]
    assert len(rows) == 11


def test_select_hsic_mode(tmp_path, synth_csv):
    out = tmp_path / "h.json"
    assert cli_main(["select", "--input", str(synth_csv), "--score", "hsic", "--m", "3", "--out", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert rep["score_mode"] == "hsic"
    assert max(rep["f"]) > 1.0


def test_select_workers_byte_identical(tmp_path, synth_csv):
    blobs = []
    for w in ("1", "8"):
        out = tmp_path / f"w{w}.json"
        assert cli_main(["select", "--input", str(synth_csv), "--workers", w, "--out", str(out)]) == 0
        blobs.append(out.read_bytes())
    assert blobs[0] == blobs[1]


def test_env_workers(tmp_path, synth_csv, monkeypatch):
    monkeypatch.setenv("LAND_WORKERS", "3")
    assert cli_main(["select", "--input", str(synth_csv), "--m", "2", "--out", str(tmp_path / "e.json")]) == 0


def test_select_train_fraction(tmp_path, synth_csv):
    out = tmp_path / "t.json"
    assert cli_main(["select", "--input", str(synth_csv), "--m", "3", "--train-fraction", "0.8",
                     "--seed", "1", "--out", str(out)]) == 0
    assert json.loads(out.read_text())["n"] == 96


def test_screen_and_eval(tmp_path, synth_csv):
    out = tmp_path / "s.json"
    assert cli_main(["screen", "--input", str(synth_csv), "--m", "4", "--out", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert rep["method"] == "MR-NHSIC" and len(rep["selected"]) == 4
    assert rep["f"] == sorted(rep["f"], reverse=True)
    ev = tmp_path / "e.json"
    assert cli_main(["eval", "--input", str(synth_csv), "--selection", str(out), "--out", str(ev)]) == 0
    assert json.loads(ev.read_text())["metrics"] == rep["metrics"]


def test_eval_auc(tmp_path):
    data = tmp_path / "c.csv"
    data.write_text("1,0\n2,0\n3,1\n4,1\n")
    scores = tmp_path / "p.txt"
    scores.write_text("0.1\n0.2\n0.8\n0.9\n")
    out = tmp_path / "e.json"
    assert cli_main(["eval", "--input", str(data), "--features", "0", "--scores", str(scores),
                     "--out", str(out)]) == 0
    m = json.loads(out.read_text())["metrics"]
    assert m["auc"] == 1.0 and m["independence_rate"] is None


def test_nhsic_matrix(tmp_path, synth_csv, capsys):
    assert cli_main(["nhsic", "--input", str(synth_csv), "--features", "0,40"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].split("\t") == ["", "x0", "x40", "y"]
    assert float(lines[1].split("\t")[1]) == pytest.approx(1.0, abs=1e-8)
    assert float(lines[1].split("\t")[2]) == pytest.approx(1.0, abs=1e-3)
    assert cli_main(["nhsic", "--input", str(synth_csv), "--features", "0,40", "--oracle"]) == 0
    exact = capsys.readouterr().out.splitlines()
    assert float(exact[1].split("\t")[1]) == pytest.approx(1.0, abs=1e-12)


def test_exit_codes(tmp_path, synth_csv, capsys):
    assert cli_main(["select", "--bogus"]) == 1
    assert cli_main(["frobnicate"]) == 1
    assert cli_main(["select", "--input", str(tmp_path / "missing.csv")]) == 2
    assert cli_main(["select", "--input", str(synth_csv), "--m", "1000"]) == 1
    bad = tmp_path / "bad.csv"
    bad.write_text("1,2\n3\n")
    assert cli_main(["select", "--input", str(bad)]) == 1
    assert "line 2" in capsys.readouterr().err
