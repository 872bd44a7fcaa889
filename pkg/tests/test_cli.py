import json
import subprocess
import sys
from pathlib import Path

import pytest

from asymlab.cli import COMMANDS, main

DEMO = str(Path(__file__).resolve().parents[1] / "bundles" / "demo.json")


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def report(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--input", DEMO)
    assert code == 0
    return json.loads(out)


def test_report_header(capsys):
    rep = report(capsys, "op-norm")
    assert rep["command"] == "op-norm" and rep["tool"] == "asymlab"
    assert rep["seed"] == 0 and rep["tolerance"] == 1e-9
    assert len(rep["input_sha256"]) == 64
    assert "wall_time" not in rep
    assert report(capsys, "op-norm", "--timing")["wall_time"] >= 0


def test_op_norm_values(capsys):
    res = report(capsys, "op-norm")["results"]
    assert res["id"]["flat_norm"] == 1.0
    assert res["neg"]["flat_norm"] == "inf"


def test_check_compact_negation(capsys):
    res = report(capsys, "check-compact")["results"]
    assert res["neg"]["compact"] is False
    assert res["neg"]["witness_ray"] == [-1.0]
    assert res["id"]["compact"] is True


def test_check_compact_with_net(capsys):
    res = report(capsys, "check-compact", "--epsilon", "0.25")["results"]
    assert res["id"]["net"]["verified"]
    assert "net" not in res["neg"]


def test_validate_norm_reports_invalid_with_success_code(capsys):
    res = report(capsys, "validate-norm")["results"]
    assert res["flat"]["valid"] is False
    assert res["u"]["valid"] is True


def test_classify_sequence(capsys):
    res = report(capsys, "classify-sequence", "--epsilon", "0.5")["results"]
    assert res["down"]["chain"]["ok"] and res["peak"]["chain"]["ok"]


def test_every_command_runs(capsys):
    for cmd in COMMANDS:
        if cmd == "property-suite":
            continue
        code, out, err = run(capsys, cmd, "--input", DEMO)
        assert code == 0, (cmd, err)
        assert json.loads(out)["command"] == cmd


def test_cover_vs_net_csv(capsys):
    code, out, _ = run(capsys, "cover-vs-net", "--input", DEMO, "--format", "csv",
                       "--epsilon", "1", "--epsilon", "2")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "instance,epsilon,net_size_greedy,net_size_exact,cover_size_exact"
    assert len(lines) == 1 + 2 * 2


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["no-such-command"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["op-norm"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["op-norm", "--input", DEMO, "--format", "csv"])
    assert exc.value.code == 2
    capsys.readouterr()


def test_malformed_input(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, "op-norm", "--input", str(bad))[0] == 3
    bad.write_text(json.dumps({"norms": {"u": {"dim": 1, "generators": [[1, 2]]}}}))
    assert run(capsys, "op-norm", "--input", str(bad))[0] == 3
    bad.write_text(json.dumps({"extra": {}}))
    assert run(capsys, "op-norm", "--input", str(bad))[0] == 3
    assert run(capsys, "op-norm", "--input", str(tmp_path / "missing.json"))[0] == 3


def test_unresolved_reference(capsys, tmp_path):
    doc = {"norms": {"u": {"dim": 1, "generators": [[1]]}},
           "operators": {"A": {"matrix": [[1]], "domain": "u", "codomain": "v"}}}
    path = tmp_path / "ref.json"
    path.write_text(json.dumps(doc))
    code, _, err = run(capsys, "op-norm", "--input", str(path))
    assert code == 4 and "'v'" in err


def test_output_file_and_determinism(capsys, tmp_path, monkeypatch):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    args = ["property-suite", "--scale", "0.01"]
    assert main(args + ["--seed", "3", "--output", str(a)]) == 0
    monkeypatch.setenv("ASYMLAB_SEED", "3")
    assert main(args + ["--jobs", "2", "--output", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert json.loads(a.read_text())["seed"] == 3


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "asymlab", "op-norm", "--input", DEMO],
                         capture_output=True, text=True, check=True).stdout
    assert json.loads(out)["results"]["id"]["flat_norm"] == 1.0
