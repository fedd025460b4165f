import json

import pytest

from extmod.builder import build
from extmod.cli import main
from extmod.errors import MalformedRepresentation
from extmod.grading import WeightSpec, parse_element, zero
from extmod.serialize import dumps, loads, to_latex
from extmod.sheaf import CokernelDatum

BUILD = ["build", "--weights", "2,3,7", "--y", "0;0,0,0", "--arms", "1,2,3", "--powers", "1,1,1"]


def test_json_round_trip():
    spec = WeightSpec.make((2, 2, 2, 3), (1, "2/3"))
    rep = build(CokernelDatum(parse_element(spec, "1;1,0,1,2"), (1, 3, 4), (1, 1, 2)))
    text = dumps(rep)
    back, meta = loads(text)
    assert back == rep and meta is None
    assert dumps(back) == text
    doc = json.loads(text)
    assert doc["lambdas"] == ["1", "2/3"]
    assert doc["arrows"][0] == {"id": "a1@1", "from": "0", "to": "1@1"}
    assert all(isinstance(x, str) for rows in doc["matrices"].values() for r in rows for x in r)


def test_malformed_documents():
    spec = WeightSpec.make((2, 3, 7))
    good = json.loads(dumps(build(CokernelDatum(zero(spec), (1, 2, 3), (1, 1, 1)))))
    for mutate in [lambda d: d.pop("dims"),
                   lambda d: d.update(weights=[2, 2]),
                   lambda d: d["matrices"].update({"a1@1": [["1", "0"]]}),
                   lambda d: d["matrices"]["a1@1"][0].__setitem__(0, "x"),
                   lambda d: d["dims"].update({"0": -1})]:
        doc = json.loads(json.dumps(good))
        mutate(doc)
        with pytest.raises(MalformedRepresentation):
            loads(json.dumps(doc))
    with pytest.raises(MalformedRepresentation):
        loads("{\"weights\": [2,")


def test_latex_uses_lambda_symbols():
    spec = WeightSpec.make((2, 2, 2, 3), (1, 5))
    rep = build(CokernelDatum(parse_element(spec, "1;1,0,1,2"), (1, 2, 4), (1, 1, 2)))
    tex = to_latex(rep)
    assert r"\lambda_{4}" in tex
    assert tex.count(r"\begin{pmatrix}") + tex.count(r"\times") >= len(rep.quiver.arrows)


def test_info(capsys):
    assert main(["info", "--weights", "2,3,7"]) == 0
    out = capsys.readouterr().out
    assert "-1/42" in out and "wild" in out and "vertices  11" in out
    assert main(["info", "--weights", "2,3,6"]) == 0
    assert "tubular" in capsys.readouterr().out
    assert main(["info", "--weights", "2,2"]) == 2


def test_build_and_verify(tmp_path, capsys):
    a = tmp_path / "a.json"
    assert main(BUILD + ["--out", str(a)]) == 0
    out = capsys.readouterr().out
    assert "case      A" in out and "rank      2" in out
    assert main(["verify", str(a)]) == 0
    assert "verdict   PASS" in capsys.readouterr().out
    b = tmp_path / "b.json"
    assert main(BUILD + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    back, meta = loads(a.read_text())
    assert dumps(back, meta) == a.read_text()


def test_build_cokernel_method(tmp_path, capsys):
    assert main(BUILD + ["--method", "cokernel", "--out", str(tmp_path / "c.json")]) == 0
    assert "methods agree" in capsys.readouterr().out


def test_build_to_stdout_is_clean_json(capsys):
    assert main(BUILD) == 0
    captured = capsys.readouterr()
    assert json.loads(captured.out)["datum"]["case"] == "A"
    assert "case" in captured.err


def test_build_latex(tmp_path):
    out = tmp_path / "m.tex"
    assert main(BUILD + ["--format", "latex", "--out", str(out)]) == 0
    assert r"\begin{pmatrix}" in out.read_text()


def test_build_input_errors():
    assert main(BUILD[:-1] + ["1,1,9"]) == 2
    assert main(["build", "--weights", "2,3,7", "--y", "-1;0,0,0", "--arms", "1,2,3",
                 "--powers", "1,1,1"]) == 2
    assert main(["build", "--weights", "2,3,7", "--y", "0;0,0,0", "--arms", "1,2",
                 "--powers", "1,1"]) == 2
    assert main(BUILD + ["--mu", "1,0,1"]) == 2
    assert main(["build"]) == 2


def test_verify_failures(tmp_path, capsys):
    path = tmp_path / "e.json"
    args = ["build", "--weights", "2,3,7", "--y", "1;0,0,0", "--arms", "1,2,3", "--powers", "1,1,1"]
    assert main(args + ["--out", str(path)]) == 0
    doc = json.loads(path.read_text())
    doc["matrices"]["a1@1"][0][0] = "2"
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(doc))
    capsys.readouterr()
    assert main(["verify", str(bad)]) == 1
    out = capsys.readouterr().out
    assert "relations    FAIL" in out and "arm 3" in out
    trunc = tmp_path / "trunc.json"
    trunc.write_text(path.read_text()[:100])
    assert main(["verify", str(trunc)]) == 2
    assert main(["verify", str(tmp_path / "missing.json")]) == 2


def test_sweep(tmp_path, capsys):
    out = tmp_path / "sweep"
    assert main(["sweep", "--weights", "2,2,2,3", "--max-c", "0", "--arms", "1,3,4",
                 "--out", str(out)]) == 0
    rows = (out / "summary.tsv").read_text().splitlines()
    assert len(rows) == 1 + 24 * 2
    assert all(r.endswith("\tok") for r in rows[1:])
    hist = dict(line.split("\t") for line in (out / "histogram.tsv").read_text().splitlines()[1:])
    assert sum(map(int, hist.values())) == 48 and set(hist) == {"A", "B1", "B2", "B3", "C1", "C2", "C3", "D"}
    some = next((out / "A").glob("*.json"))
    capsys.readouterr()
    assert main(["verify", str(some)]) == 0


def test_sweep_empty(tmp_path, capsys):
    out = tmp_path / "empty"
    assert main(["sweep", "--weights", "2,3,7", "--max-c", "-1", "--out", str(out)]) == 0
    assert (out / "summary.tsv").read_text().count("\n") == 1
    assert main(["sweep", "--weights", "2,3,7", "--max-c", "0", "--arms", "3,2,1",
                 "--out", str(out)]) == 2
