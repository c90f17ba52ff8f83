import json
import subprocess
import sys
from pathlib import Path

from expanderlab.cli import main

FP_SET = {"field": "fp", "p": 101, "elements": [3, 5, 9, 11, 17, 23]}
FP_SET_B = {"field": "fp", "p": 101, "elements": [2, 7, 13, 19]}
Q_SET = {"field": "q", "elements": ["2", "3", "5"]}
Q_WITH_ONE = {"field": "q", "elements": ["1", "2", "3"]}


def write(tmp_path: Path, name: str, doc) -> str:
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def test_verify_r6_exit_zero(tmp_path, capsys):
    a = write(tmp_path, "a.json", FP_SET)
    b = write(tmp_path, "b.json", FP_SET_B)
    out = tmp_path / "rep.json"
    assert main(["verify", a, b, "--relation", "R6", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["reports"][0]["verdict"] == "Holds"
    assert (tmp_path / "rep.manifest.json").exists()


def test_verify_all_with_one_in_set(tmp_path):
    bad = write(tmp_path, "bad.json", Q_WITH_ONE)
    assert main(["verify", bad, "--all"]) == 64


def test_verify_r1_batch(tmp_path):
    a = write(tmp_path, "a.json", FP_SET)
    b = write(tmp_path, "b.json", FP_SET_B)
    c = write(tmp_path, "c.json", {"field": "fp", "p": 101, "elements": [1, 4, 6]})
    assert main(["verify", a, b, c, "--relation", "R1"]) == 0


def test_verify_malformed_input(tmp_path):
    bad = tmp_path / "broken.json"
    bad.write_text("{not json")
    assert main(["verify", str(bad), "--relation", "R2"]) == 64


def test_pipeline_density_violated(tmp_path):
    small = write(tmp_path, "small.json", {"field": "fp", "p": 7, "elements": [1, 2, 3]})
    assert main(["pipeline", small, "--mode", "fp",
                 "--out", str(tmp_path / "t.json")]) == 64


def test_pipeline_real_trace(tmp_path):
    q = write(tmp_path, "q.json", Q_SET)
    out = tmp_path / "trace.json"
    assert main(["pipeline", q, "--mode", "real", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert len(doc["steps"]) >= 5
    assert doc["mode"] == "real"


def test_pipeline_identical_bytes(tmp_path):
    q = write(tmp_path, "q.json", Q_SET)
    out1, out2 = tmp_path / "t1.json", tmp_path / "t2.json"
    assert main(["pipeline", q, "--mode", "real", "--out", str(out1)]) == 0
    assert main(["pipeline", q, "--mode", "real", "--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_search_exhaustive_csv(tmp_path):
    out = tmp_path / "res.csv"
    assert main(["search", "--p", "7", "--n", "2", "--mode", "exhaustive",
                 "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[1].startswith("7,2,3,")
    assert "true,2 4" in lines[1]


def test_search_seed_repeatable(tmp_path):
    args = ["search", "--p", "53", "--n", "3", "--mode", "anneal", "--seed", "9",
            "--restarts", "3", "--iterations", "80"]
    out1, out2 = tmp_path / "r1.csv", tmp_path / "r2.csv"
    assert main(args + ["--out", str(out1)]) == 0
    assert main(args + ["--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_search_nonprime_exit(tmp_path):
    assert main(["search", "--p", "4", "--n", "2",
                 "--out", str(tmp_path / "x.csv")]) == 64


def test_search_budget_exit(tmp_path):
    assert main(["search", "--p", "101", "--n", "9", "--budget", "10",
                 "--out", str(tmp_path / "x.csv")]) == 65


def test_energy_dump(tmp_path):
    a = write(tmp_path, "a.json", FP_SET)
    out = tmp_path / "e.json"
    assert main(["energy", a, "--kind", "ratio", "--alpha", "2", "--alpha", "3/2",
                 "--delta", "1", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert "2" in doc["energies"] and "3/2" in doc["energies"]
    assert doc["split"]["delta"] == 1


def test_replay_regenerates_identical(tmp_path):
    q = write(tmp_path, "q.json", Q_SET)
    out = tmp_path / "trace.json"
    assert main(["pipeline", q, "--mode", "real", "--out", str(out)]) == 0
    first = out.read_bytes()
    out.unlink()
    assert main(["replay", str(tmp_path / "trace.manifest.json")]) == 0
    assert out.read_bytes() == first


def test_console_script_installed():
    proc = subprocess.run([sys.executable, "-m", "expanderlab.cli", "--version"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "expanderlab" in proc.stdout


def test_fails_aborts_with_counterexample(tmp_path, monkeypatch):
    from expanderlab import cli as cli_mod
    from expanderlab.verify import InequalityReport

    def fake_check(name, cap=None, **kwargs):
        return InequalityReport(name, 5, 4, "Fails", None, "deadbeef", "forced")

    monkeypatch.setattr(cli_mod, "check", fake_check)
    a = write(tmp_path, "a.json", FP_SET)
    b = write(tmp_path, "b.json", FP_SET_B)
    out = tmp_path / "rep.json"
    assert main(["verify", a, b, "--relation", "R6", "--out", str(out)]) == 2
    bad = out.with_suffix(".counterexample.json")
    assert bad.exists()
    doc = json.loads(bad.read_text())
    assert doc["failed"][0]["verdict"] == "Fails"


def test_inconclusive_exit_code(tmp_path, monkeypatch):
    from expanderlab import cli as cli_mod
    from expanderlab.verify import InequalityReport

    def fake_check(name, cap=None, **kwargs):
        return InequalityReport(name, None, None, "Inconclusive", None, "deadbeef", "")

    monkeypatch.setattr(cli_mod, "check", fake_check)
    a = write(tmp_path, "a.json", FP_SET)
    b = write(tmp_path, "b.json", FP_SET_B)
    assert main(["verify", a, b, "--relation", "R6"]) == 3
