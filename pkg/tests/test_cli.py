import json

import pytest

from crnx.cli import main

from conftest import ACR, LINKED, QUARTIC, SWITCHING


@pytest.fixture
def files(tmp_path):
    out = {}
    for name, text in [("acr", ACR), ("quartic", QUARTIC), ("switching", SWITCHING), ("linked", LINKED),
                       ("bad", "A + -> B : 1\n")]:
        p = tmp_path / f"{name}.crn"
        p.write_text(text)
        out[name] = str(p)
    return out


def test_analyze_acr(files, tmp_path, capsys):
    out = tmp_path / "r.json"
    assert main(["analyze", files["acr"], "--window", "20", "--json", str(out)]) == 0
    text = capsys.readouterr().out
    assert "weakly reversible: yes" in text and "deficiency 0" in text
    data = json.loads(out.read_text())
    assert data["classification"]["verdicts"][0] == "non-explosive-certified"


def test_analyze_quartic(files, capsys):
    assert main(["analyze", files["quartic"]]) == 0
    text = capsys.readouterr().out
    assert "deficiency 3" in text and "explosive" in text


def test_analyze_parse_error(files, capsys):
    assert main(["analyze", files["bad"]]) == 2
    err = capsys.readouterr().err
    assert "bad.crn:1:5" in err


def test_analyze_missing_file(tmp_path):
    assert main(["analyze", str(tmp_path / "nope.crn")]) == 2


def test_inconsistency_exit_code(files, monkeypatch):
    import crnx.cli as cli
    from crnx.classify import InconsistentVerdict

    def boom(*a, **k):
        raise InconsistentVerdict("forced")

    monkeypatch.setattr(cli, "analyze_network", boom)
    assert main(["analyze", files["acr"]]) == 3


def test_simulate_explosion(files, capsys):
    assert main(["simulate", files["switching"], "--x0", "0,0,2", "--seed", "3", "--record", "none"]) == 0
    assert "explosion symptom" in capsys.readouterr().out


def test_simulate_occupancy_and_tv(files, tmp_path, capsys):
    prefix = tmp_path / "lq"
    assert main(["simulate", files["linked"], "--x0", "0,0", "--T", "2000", "--seed", "1", "--out", str(prefix)]) == 0
    assert "total variation" in capsys.readouterr().out
    assert (tmp_path / "lq.occupancy").exists()


def test_simulate_full_writes_paths(files, tmp_path):
    prefix = tmp_path / "p"
    assert main(["simulate", files["linked"], "--x0", "0,0", "--T", "5", "--seed", "1", "--runs", "2",
                 "--record", "full", "--out", str(prefix)]) == 0
    assert (tmp_path / "p.run1.traj").exists()


@pytest.mark.parametrize("args", [["--x0", "0,0,1"], ["--x0", "a,b"], ["--x0", "0,0", "--runs", "3"],
                                  ["--x0", "0,0", "--T", "-1"]])
def test_simulate_input_errors(files, args):
    assert main(["simulate", files["linked"], *args]) == 2


def test_classify_bd(capsys, tmp_path):
    out = tmp_path / "c.json"
    assert main(["classify-bd", "--birth", "x^3", "--death", "x^2*(x-1)", "--json", str(out)]) == 0
    assert "positive-recurrent" in capsys.readouterr().out
    assert "positive-recurrent" in json.loads(out.read_text())["verdicts"]
    assert main(["classify-bd", "--birth", "x^", "--death", "x"]) == 2


def test_verify_stationary(capsys):
    assert main(["verify-stationary", "integer-line"]) == 0
    text = capsys.readouterr().out
    assert text.count("passes") == 2 and "verdicts: explosive" in text
    assert main(["verify-stationary", "infinite-server", "--tol", "1e-8"]) == 0
    assert main(["verify-stationary", "nothing"]) == 2
