"""Command-line interface."""

import json
import subprocess
import sys
from pathlib import Path

import pytest

from invwb.cli import main

DATA = Path(__file__).parent / "data"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_check_entry_passes(capsys):
    code, out, _ = run(capsys, "check", "gcd_division", "--seed", "7")
    assert code == 0
    assert "all obligations pass" in out


def test_check_broken_file_fails_with_initiation(capsys):
    code, out, _ = run(capsys, "check", str(DATA / "broken_init.inv"), "--format", "json")
    assert code == 1
    rep = json.loads(out)
    first = rep["routines"][0]["failures"][0]
    assert first["verdicts"][0]["obligation"] == "initiation"


def test_replay_witness(capsys, tmp_path):
    _, out, _ = run(capsys, "check", str(DATA / "broken_guard.inv"), "--format", "json")
    case = json.loads(out)["routines"][0]["failures"][0]["case"]
    (tmp_path / "w.json").write_text(json.dumps(case))
    code, out, _ = run(capsys, "check", str(DATA / "broken_guard.inv"),
                       "--replay", str(tmp_path / "w.json"), "--format", "json")
    assert code == 1
    again = json.loads(out)["routines"][0]
    assert again["inputs"] == 1 and again["failures"][0]["case"]["args"] == case["args"]


def test_unknown_entry_exit_code(capsys):
    code, _, err = run(capsys, "check", "nonexistent")
    assert code == 2 and "unknown entry" in err


def test_parse_error_exit_code(capsys, tmp_path):
    bad = tmp_path / "bad.inv"
    bad.write_text("f (x: INTEGER): INTEGER\n  do\n    Result := * x\n  end\n")
    code, _, err = run(capsys, "check", str(bad))
    assert code == 2 and "3:" in err


def test_bad_flag_exit_code(capsys):
    code, _, _ = run(capsys, "check", "gcd_division", "--format", "xml")
    assert code == 2


def test_infer_max_one_way(capsys):
    code, out, _ = run(capsys, "infer", "max_one_way")
    assert code == 0
    survivors = [line for line in out.splitlines() if line.startswith("  [")]
    assert "Result = max(a[a.lower..i])" in survivors[0]


def test_infer_gcd_division(capsys):
    code, out, _ = run(capsys, "infer", "gcd_division", "--format", "json")
    assert code == 0
    assert "gcd(x, y) = gcd(a, b)" in [s["clause"] for s in json.loads(out)["survivors"]]


def test_infer_pagerank_unsupported(capsys):
    code, out, _ = run(capsys, "infer", "pagerank")
    assert code == 1
    assert "real-valued postcondition: inference unsupported" in out


def test_infer_short_recall_exits_one(capsys):
    # With budget 0 only verbatim postcondition clauses exist, which
    # cannot match a loop invariant mentioning loop variables.
    code, _, _ = run(capsys, "infer", "max_one_way", "--budget", "0")
    assert code == 1


def test_run_examples(capsys):
    assert run(capsys, "run", "divided_diff", "7", "2")[1].strip() == "q=3 r=1"
    assert run(capsys, "run", "power_binary", "2", "10")[1].strip() == "1024"
    assert run(capsys, "run", "selection_sort", "[3, 1, 2]")[1].strip() == "a=[1, 2, 3]"
    assert run(capsys, "run", "bst:has_bst", "x", "1")[0] == 2


def test_run_wrong_arity(capsys):
    code, _, err = run(capsys, "run", "divided_diff", "7")
    assert code == 2 and "takes 2" in err


def test_corpus_list(capsys):
    code, out, _ = run(capsys, "corpus", "list")
    assert code == 0 and len(out.strip().splitlines()) == 20
    code, out, _ = run(capsys, "corpus", "list", "--format", "json")
    assert len(json.loads(out)) == 20


def test_text_and_json_report_the_same_failures(capsys):
    _, text, _ = run(capsys, "check", str(DATA / "broken_swap.inv"))
    _, js, _ = run(capsys, "check", str(DATA / "broken_swap.inv"), "--format", "json")
    failures = json.loads(js)["routines"][0]["failures"]
    assert text.count("  input #") == len(failures)
    for f in failures:
        for v in f["verdicts"]:
            assert v["obligation"] in text


@pytest.mark.parametrize("argv", [
    ["check", "has_sequential", "--seed", "3", "--format", "json"],
    ["infer", "divided_diff", "--seed", "3", "--suite-size", "30", "--format", "json"],
])
def test_json_is_byte_identical(capsys, argv):
    a = run(capsys, *argv)[1]
    b = run(capsys, *argv)[1]
    assert a == b


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "invwb", "run", "divided_diff", "7", "2"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip() == "q=3 r=1"
