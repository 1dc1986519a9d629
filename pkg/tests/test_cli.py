import json

from t2mc.cli import main

JORDAN3_FILE = """3
[["2","3","7"],["0","2","5"],["0","0","2"]]
[["1","0","0"],["0","1","0"],["0","0","1"]]
"""

TWOGEN_FILE = """3
[["1","1","0"],["0","1","0"],["0","0","1"]]
[["1","0","1"],["0","1","0"],["0","0","1"]]
"""

NONCOMMUTING = """2
[["1","1"],["0","1"]]
[["0","1"],["1","0"]]
"""


def _write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


def test_ssify_jordan3(tmp_path, capsys):
    path = _write(tmp_path, "v3.rep", JORDAN3_FILE)
    assert main(["ssify", path]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["schema"] == 1
    assert payload["characters"] == [["2", "1"]] * 3
    assert payload["eta_dt1"] == [["0", "-3/2", "-13/8"],
                                  ["0", "0", "-5/2"],
                                  ["0", "0", "0"]]
    assert payload["eta_s"][0][1] == "-3/2*s1"
    assert payload["eta_s"][1][2] == "-5/2*s1"


def test_ssify_diagonal(tmp_path, capsys):
    path = _write(tmp_path, "diag.rep",
                  '2\n[["2","0"],["0","3"]]\n[["1","0"],["0","1"]]\n')
    assert main(["ssify", path]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["eta_dt1"] == [["0", "0"], ["0", "0"]]
    assert payload["eta_dt2"] == [["0", "0"], ["0", "0"]]


def test_ssify_noncommuting_exits_2(tmp_path, capsys):
    path = _write(tmp_path, "bad.rep", NONCOMMUTING)
    assert main(["ssify", path]) == 2
    assert "commute" in capsys.readouterr().err


def test_ssify_parse_error_exits_3(tmp_path, capsys):
    path = _write(tmp_path, "garbage.rep", "not a rep\n")
    assert main(["ssify", path]) == 3
    capsys.readouterr()


def test_t2_cohomology_trivial(tmp_path, capsys):
    path = _write(tmp_path, "triv.rep", '1\n[["1"]]\n[["1"]]\n')
    assert main(["t2-cohomology", path]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["betti_cellular"] == [1, 2, 1]
    assert payload["betti_model"] == [1, 2, 1]
    assert payload["agree"] is True


def test_t2_cohomology_character(tmp_path, capsys):
    path = _write(tmp_path, "char.rep", '1\n[["2"]]\n[["1"]]\n')
    assert main(["t2-cohomology", path]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["betti_cellular"] == [0, 0, 0]
    assert payload["agree"] is True


def test_t2_cohomology_v5_unipotent(tmp_path, capsys):
    path = _write(tmp_path, "v5.rep", TWOGEN_FILE)
    assert main(["t2-cohomology", path]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["betti_cellular"][0] == 1
    assert payload["agree"] is True


def test_t2_cohomology_single_backend(tmp_path, capsys):
    path = _write(tmp_path, "triv.rep", '1\n[["1"]]\n[["1"]]\n')
    assert main(["t2-cohomology", path, "--backend", "cellular"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert "betti_model" not in payload


def test_verify_passes_and_is_deterministic(tmp_path, capsys):
    out1 = str(tmp_path / "r1.json")
    out2 = str(tmp_path / "r2.json")
    assert main(["verify", "--out", out1]) == 0
    first_stdout = capsys.readouterr().out
    assert main(["verify", "--out", out2]) == 0
    second_stdout = capsys.readouterr().out
    assert first_stdout == second_stdout
    b1 = open(out1, "rb").read()
    b2 = open(out2, "rb").read()
    assert b1 == b2
    payload = json.loads(b1)
    assert payload["pass"] is True
    assert payload["sections"]["chain_map"]["s1"]["failing"] == ["xb"]
    assert payload["sections"]["chain_map"]["s2"]["failing"] == []


def test_t2_cohomology_disagreement_exits_4(tmp_path, capsys, monkeypatch):
    import t2mc.cli as cli
    monkeypatch.setattr(cli, "_model_betti", lambda rep, bound: (9, 9, 9))
    path = _write(tmp_path, "triv.rep", '1\n[["1"]]\n[["1"]]\n')
    assert main(["t2-cohomology", path]) == 4
    capsys.readouterr()


def test_verify_single_variant(capsys):
    assert main(["verify", "--variant", "s2"]) == 0
    out = capsys.readouterr().out
    assert "s2 failing generators: []" in out


def test_verify_custom_params(capsys):
    assert main(["verify", "--params", "3,2,7,5"]) == 0
    capsys.readouterr()
