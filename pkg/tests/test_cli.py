import json
import os
import xml.etree.ElementTree as ET

import pytest

from adamsext.cli import EXIT_FAIL, EXIT_INTERNAL, EXIT_OK, EXIT_USAGE, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_resolve_json_ext2(capsys):
    code, out, _ = run(capsys, "resolve", "--p", "5", "--module", "sphere", "--max-s", "2", "--max-t", "120", "--format", "json")
    assert code == EXIT_OK
    chart = json.loads(out)
    ext2 = sorted(e["t"] for e in chart["entries"] if e["s"] == 2)
    assert ext2 == [2, 17, 40, 41, 56, 88]
    code2, out2, _ = run(capsys, "resolve", "--p", "5", "--module", "sphere", "--max-s", "2", "--max-t", "120", "--format", "json")
    assert out2 == out


def test_resolve_m(capsys):
    code, out, _ = run(capsys, "resolve", "--p", "5", "--module", "M", "--max-s", "1", "--max-t", "2")
    assert code == EXIT_OK
    assert {"s": 0, "t": 0, "dim": 1} in [{k: e[k] for k in ("s", "t", "dim")} for e in json.loads(out)["entries"]]


def test_usage_errors(capsys):
    assert run(capsys, "resolve", "--p", "4", "--max-s", "1", "--max-t", "2")[0] == EXIT_USAGE
    assert run(capsys, "resolve", "--p", "5", "--max-s", "-1", "--max-t", "2")[0] == EXIT_USAGE
    assert run(capsys, "may", "--s", "2", "--t", "p-1")[0] == EXIT_USAGE
    assert run(capsys, "may", "--s", "2", "--t", "p^n")[0] == EXIT_USAGE
    assert run(capsys, "frobnicate")[0] == EXIT_USAGE
    assert run(capsys, "resolve", "--max-s", "1", "--max-t", "2", "--format", "png")[0] == EXIT_USAGE


def test_store_and_env(capsys, tmp_path, monkeypatch):
    store = tmp_path / "store"
    argv = ["resolve", "--module", "K", "--max-s", "2", "--max-t", "30", "--store", str(store)]
    code, first, _ = run(capsys, *argv)
    assert code == EXIT_OK and os.listdir(store) == ["K_p5.json"]
    code, again, _ = run(capsys, *argv)
    assert again == first
    monkeypatch.setenv("ADAMSEXT_STORE", str(tmp_path / "env"))
    code, from_env, _ = run(capsys, "resolve", "--module", "K", "--max-s", "2", "--max-t", "30")
    assert from_env == first and os.listdir(tmp_path / "env") == ["K_p5.json"]


def test_no_implicit_store(capsys, tmp_path, monkeypatch):
    monkeypatch.delenv("ADAMSEXT_STORE", raising=False)
    monkeypatch.chdir(tmp_path)
    run(capsys, "resolve", "--module", "M", "--max-s", "1", "--max-t", "5")
    assert os.listdir(tmp_path) == []


def test_corrupt_store(capsys, tmp_path):
    store = tmp_path / "s"
    run(capsys, "resolve", "--module", "M", "--max-s", "1", "--max-t", "10", "--store", str(store))
    path = store / "M_p5.json"
    path.write_text(path.read_text().replace('"computed_t":[', '"computed_t":[1,'))
    code, _, err = run(capsys, "resolve", "--module", "M", "--max-s", "1", "--max-t", "10", "--store", str(store))
    assert code == EXIT_INTERNAL and "checksum" in err


def test_may(capsys):
    code, out, _ = run(capsys, "may", "--p", "5", "--s", "5", "--t", "p^n*q+(p+2)*q", "--n", "3..10", "--expect-empty")
    assert code == EXIT_OK and out.count("empty") == 8
    code, out, _ = run(capsys, "may", "--p", "5", "--s", "2", "--t", "88")
    assert code == EXIT_OK and out.strip() == "E1^{2,88}: h_{1,1}h_{2,0}"
    code, out, _ = run(capsys, "may", "--p", "5", "--s", "0", "--t", "7", "--format", "json")
    assert json.loads(out)[0]["empty"]
    assert run(capsys, "may", "--p", "5", "--s", "2", "--t", "88", "--expect-empty")[0] == EXIT_FAIL


def test_les(capsys):
    code, out, _ = run(capsys, "les", "--format", "json")
    assert code == EXIT_OK
    reps = json.loads(out)
    assert {r["proposition"]: r["concluded_dim"] for r in reps} == {"2.2": 1, "2.3": 2, "2.5": 0, "2.6": 1, "2.7": 1}
    code, out, _ = run(capsys, "les", "--prop", "2.6")
    assert code == EXIT_OK and "beta_*i'_*i_*(h_n)" in out
    code, out, _ = run(capsys, "les", "--cross-check", "0", "--max-s", "2", "--max-t", "30")
    assert code == EXIT_OK and json.loads(out)["ok"]


def test_les_with_thin_factbase(capsys, tmp_path):
    path = tmp_path / "facts.json"
    path.write_text(json.dumps({"version": 1, "p": 5, "facts": []}))
    code, out, _ = run(capsys, "les", "--prop", "2.5", "--facts", str(path))
    assert code == EXIT_FAIL and "Missing" in out


def test_product(capsys):
    code, out, _ = run(capsys, "product", "--a", "1,1", "--b", "2,56")
    assert code == EXIT_OK
    res = json.loads(out)
    assert res["zero"] and res["product"] == [3, 57]
    code, out, _ = run(capsys, "product", "--a", "1,1", "--b", "1,1")
    assert json.loads(out)["vector"] == [1]
    assert run(capsys, "product", "--a", "1,2", "--b", "1,1")[0] == EXIT_USAGE


def test_verify(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "ext1", "--p", "5")
    rep = json.loads(out)
    assert code == EXIT_OK and rep["ok"]
    assert rep["checks"][0]["actual"] == [1, 8, 40, 200]
    code, out, _ = run(capsys, "verify", "--suite", "products", "--format", "text")
    assert code == EXIT_OK and "PASS a_0 * g_0" in out


def test_verify_failure_exit(capsys, tmp_path):
    path = tmp_path / "facts.json"
    path.write_text(json.dumps({"version": 1, "p": 5, "facts": []}))
    code, out, _ = run(capsys, "verify", "--suite", "les", "--facts", str(path))
    assert code == EXIT_FAIL and not json.loads(out)["ok"]


@pytest.fixture
def chart_file(capsys, tmp_path):
    path = tmp_path / "chart.json"
    assert run(capsys, "resolve", "--max-s", "2", "--max-t", "120", "--output", str(path))[0] == EXIT_OK
    return path


def test_export_json_round_trip(capsys, chart_file):
    code, out, _ = run(capsys, "export", "--chart", str(chart_file), "--format", "json")
    assert code == EXIT_OK and out == chart_file.read_text()


def test_export_text_grid(capsys, chart_file):
    code, out, _ = run(capsys, "export", "--chart", str(chart_file), "--format", "text")
    row = next(line for line in out.splitlines() if line.startswith("  2 | "))
    cells = row[len("  2 | "):]
    assert cells[86] == "1"
    assert [i for i, c in enumerate(cells) if c != "."] == [0, 15, 38, 39, 54, 86]
    assert "(stem 86, s 2) dim 1 [k_0]" in out


def test_export_svg(capsys, chart_file):
    code, out, _ = run(capsys, "export", "--chart", str(chart_file), "--format", "svg")
    root = ET.fromstring(out)
    assert root.tag.endswith("svg")
    circles = [e for e in root.iter() if e.tag.endswith("circle")]
    assert len(circles) == 1 + 3 + 6  # Ext^0, Ext^1 and Ext^2 through t = 120


def test_export_errors(capsys, tmp_path):
    assert run(capsys, "export", "--chart", str(tmp_path / "nope.json"), "--format", "json")[0] == EXIT_INTERNAL
    assert run(capsys, "export", "--chart", "x", "--format", "pdf")[0] == EXIT_USAGE
