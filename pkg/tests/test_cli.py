import json
import subprocess
import sys

import pytest

from regulink.cli import main

KEYS = ["command", "params", "checks", "seed", "samples", "elapsed_ms", "conventions"]
CHECK_KEYS = ["name", "anchor", "raw", "rounded", "residual", "stderr", "pass"]


def run(tmp_path, *argv):
    out = tmp_path / "report.json"
    code = main([*argv, "--json", str(out)])
    return code, (json.loads(out.read_text()) if out.exists() else None)


def without_elapsed(text):
    return "\n".join(line for line in text.splitlines() if '"elapsed_ms"' not in line)


def test_degree_pow3(tmp_path):
    code, rep = run(tmp_path, "degree", "pow:3", "--samples", "20000")
    assert code == 0
    assert list(rep) == KEYS
    assert list(rep["checks"][0]) == CHECK_KEYS
    assert rep["checks"][0]["rounded"] == 3 and rep["checks"][0]["pass"]
    assert all(c["anchor"] for c in rep["checks"])


def test_degree_identity(tmp_path):
    code, rep = run(tmp_path, "degree", "identity", "--samples", "20000")
    assert code == 0 and rep["checks"][0]["rounded"] == 1


def test_degree_parameter_flags(tmp_path):
    code, rep = run(tmp_path, "degree", "pow", "--m", "2", "--samples", "20000")
    assert code == 0 and rep["checks"][0]["rounded"] == 2


def test_degree_so4_with_pairs(tmp_path):
    code, rep = run(tmp_path, "degree", "left-mult", "--samples", "20000", "--pair-degrees")
    assert code == 0
    assert [c["rounded"] for c in rep["checks"]] == [1, 1, 0, 1]


@pytest.mark.parametrize("key", ["nope", "pow:x", "pow:0", "eval-frame:9"])
def test_degree_bad_keys(key):
    assert main(["degree", key, "--samples", "20000"]) == 2


def test_degree_too_few_samples():
    assert main(["degree", "identity", "--samples", "100"]) == 2


def test_hopf_m1(tmp_path):
    code, rep = run(tmp_path, "hopf", "--m", "1")
    assert code == 0
    assert [c["rounded"] for c in rep["checks"]] == [1, 1, 1]


def test_hopf_too_few_samples():
    assert main(["hopf", "--samples", "5"]) == 2


@pytest.mark.parametrize("d,bit", [(1, 1), (2, 0)])
def test_link_class(tmp_path, d, bit):
    code, rep = run(tmp_path, "link-class", "--d", str(d), "--samples", "20000")
    assert code == 0
    mod2 = next(c for c in rep["checks"] if c["name"].startswith("mod-2"))
    assert mod2["rounded"] == bit


def test_link_class_literal_convention_reports_degeneracy(tmp_path):
    code, rep = run(tmp_path, "link-class", "--d", "1", "--convention", "paper",
                    "--samples", "20000")
    assert code == 0
    assert rep["params"]["convention"] == "paper"
    assert any(c["anchor"] == "literal-frame-degenerates" for c in rep["checks"])


def test_link_class_rejects_d0():
    assert main(["link-class", "--d", "0"]) == 2


def test_link_class_frame_table(tmp_path):
    out = tmp_path / "frames.txt"
    assert main(["link-class", "--d", "2", "--samples", "20000", "--out", str(out)]) == 0
    assert out.read_text().startswith("# d: 2")


def test_trace_writes_loops(tmp_path):
    out = tmp_path / "loops.txt"
    assert main(["trace", "--m", "1", "--value", "1,0,0", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("# map: ")
    assert sum(1 for l in lines if l.startswith("# loop")) == 1
    rows = [l for l in lines if not l.startswith("#")]
    assert len(rows[0].split()) == 4


def test_trace_critical_value_is_inconclusive():
    assert main(["trace", "--m", "2", "--value=-1,0,0"]) == 4


def test_trace_step_floor():
    assert main(["trace", "--step", "1e-5"]) == 2


def test_trace_bad_value():
    assert main(["trace", "--value", "1,0"]) == 2


def test_trace_unwritable_output():
    assert main(["trace", "--out", "/nonexistent/dir/loops.txt"]) == 3


def test_verify_unknown_suite():
    assert main(["verify", "nosuch"]) == 2


def test_verify_unwritable_json():
    assert main(["verify", "lemma1", "--json", "/nonexistent/dir/r.json"]) == 3


def test_verify_lemma1(tmp_path):
    code, rep = run(tmp_path, "verify", "lemma1", "--samples", "20000")
    assert code == 0
    assert rep["command"] == "verify:lemma1" and all(c["pass"] for c in rep["checks"])


def test_bad_workers():
    assert main(["degree", "identity", "--workers", "0"]) == 2


def test_deterministic_json(tmp_path, monkeypatch):
    texts = []
    for workers in ("1", "3"):
        monkeypatch.setenv("REGULINK_WORKERS", workers)
        out = tmp_path / f"r{workers}.json"
        assert main(["degree", "pow:2", "--samples", "120000", "--seed", "7", "--json", str(out)]) == 0
        texts.append(without_elapsed(out.read_text()))
    assert texts[0] == texts[1]


def test_console_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "regulink.cli", "degree", "identity",
                           "--samples", "10000", "--json", "-"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert '"command": "degree"' in proc.stdout
