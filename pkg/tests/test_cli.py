# tests/test_cli.py
import io
import json

from backend.cli import main
from backend.services.fixtures import BUILDERS

NOT_MHS = {
    "schema_version": 1,
    "name": "peso-1-degenerada",
    "dim": 2,
    "filtrations": {
        "W": {"kind": "increasing", "steps": {"1": [["1", "0"], ["0", "1"]]}},
        "F": {"kind": "decreasing", "steps": {"1": [["1", "0"]]}},
    },
}


def _json_out(capsys):
    return json.loads(capsys.readouterr().out)


def test_delta_on_fixture(capsys):
    assert main(["mhs", "delta", "fixture:fix1"]) == 0
    doc = _json_out(capsys)
    assert doc["status"] == "ok"
    assert doc["result"]["delta"] == [["0", "0"], ["1", "0"]]


def test_negative_verdict_exits_one(tmp_path, capsys):
    path = tmp_path / "not_mhs.json"
    path.write_text(json.dumps(NOT_MHS), encoding="utf-8")
    assert main(["mhs", "check", str(path)]) == 1
    doc = _json_out(capsys)
    assert doc["status"] == "negative"
    assert doc["result"]["diagnostic"]["weight"] == 1


def test_reads_stdin(monkeypatch, capsys):
    monkeypatch.setattr("sys.stdin", io.StringIO(json.dumps(BUILDERS["fix1"]())))
    assert main(["mhs", "check", "-"]) == 0
    assert _json_out(capsys)["result"]["is_mhs"] is True


def test_fixtures_list_and_show(capsys):
    assert main(["fixtures", "list"]) == 0
    names = [item["name"] for item in _json_out(capsys)["result"]]
    assert "fix7" in names
    assert main(["fixtures", "show", "fix2"]) == 0
    assert _json_out(capsys)["result"]["name"] == "fix2"
    assert main(["fixtures", "show", "fix99"]) == 2
    capsys.readouterr()


def test_suite_keeps_order_and_max_exit(capsys):
    code = main(["--suite", "orbit", "check", "fixture:fix3", "fixture:fix5", "missing.json"])
    doc = _json_out(capsys)
    assert code == 2 and doc["exit_code"] == 2
    assert [item["file"] for item in doc["suite"]] == ["fixture:fix3", "fixture:fix5", "missing.json"]
    assert [item["exit_code"] for item in doc["suite"]] == [0, 1, 2]


def test_pretty_output(capsys):
    assert main(["mhs", "delta", "fixture:fix1", "--pretty"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("command: mhs delta")
    assert "status: ok" in out


def test_out_and_csv(tmp_path, capsys):
    out, csv = tmp_path / "probe.json", tmp_path / "probe.csv"
    code = main(["orbit", "probe", "fixture:fix3_twist", "--out", str(out), "--csv", str(csv)])
    assert code == 0
    assert capsys.readouterr().out == ""
    assert len(json.loads(out.read_text(encoding="utf-8"))["result"]["table"]) == 10
    assert csv.read_text(encoding="utf-8").startswith("k,y,y_min,deviation,exact_zero,ratio")


def test_suite_csv_writes_one_table_per_input(tmp_path, capsys):
    csv = tmp_path / "tabela.csv"
    code = main(["--suite", "orbit", "probe", "fixture:fix3_twist", "fixture:fix3_twist", "--csv", str(csv)])
    assert code == 0
    assert [item["exit_code"] for item in _json_out(capsys)["suite"]] == [0, 0]
    assert not csv.exists()
    written = sorted(p.name for p in tmp_path.iterdir())
    assert written == ["tabela-0-fix3_twist.csv", "tabela-1-fix3_twist.csv"]
    for name in written:
        assert (tmp_path / name).read_text(encoding="utf-8").startswith("k,y,y_min,deviation")


def test_input_errors_exit_two(capsys):
    assert main(["mhs", "check", "nao/existe.json"]) == 2
    assert _json_out(capsys)["error"]["kind"] == "input-error"
    assert main(["foo", "bar", "fixture:fix1"]) == 2
    assert "available" in _json_out(capsys)["error"]["details"]
    assert main(["mhs", "check", "fixture:fix1", "fixture:fix2"]) == 2
    capsys.readouterr()


def test_unsupported_regime_exits_three(capsys):
    assert main(["ih", "les", "fixture:fix5"]) == 1
    assert _json_out(capsys)["error"]["kind"] == "does-not-exist"
    assert main(["zloc", "accumulation", "fixture:fix5"]) == 3
    assert _json_out(capsys)["error"]["kind"] == "unsupported"
