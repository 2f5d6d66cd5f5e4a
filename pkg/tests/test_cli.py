import io
import json

import pytest

from pathoperad.cli import main


def run(*argv, tmp=None):
    buf = io.StringIO()
    pre = ["--cache-dir", str(tmp)] if tmp else []
    code = main(pre + list(argv), out=buf)
    return code, buf.getvalue()


def test_compose():
    code, out = run("compose", "--op", "1|12|21", "--with", "213|13|23", "--with", "122|211")
    assert code == 0
    assert json.loads(out)["result"] == "213|13455|54423"


def test_text_and_dot():
    code, out = run("--format", "text", "graph", "--op", "12321434", "--m", "3")
    assert (code, out) == (0, "1>3,2>3,3>4\n")
    code, out = run("--format", "dot", "graph", "--op", "12321434", "--m", "3")
    assert out.startswith("digraph G {") and "3 -> 4;" in out


def test_join_and_complexity():
    code, out = run("--format", "text", "join", "--x", "1|1212|2|2", "--i", "2",
                    "--y", "1|12|2|2|21", "--j", "3", "--m", "3")
    assert out.strip() == "1|12123|34|42|24|43"
    assert run("--format", "text", "complexity", "--op", "1|1|1|323")[1] == "2\n"


def test_labellings_and_homology():
    assert run("--format", "text", "labellings", "--edges", "2>1,2>3", "--count")[1] == "11\n"
    rep = json.loads(run("homology", "--edges", "2>1,2>3")[1])
    assert rep["verdict"] == "collapsible" and rep["objects"] == 11
    # two-way pairs are not digraphs here
    assert run("homology", "--edges", "1>2,2>1")[0] == 2


def test_cycle_is_reported():
    code, out = run("homology", "--edges", "1>2,2>3,3>1")
    assert code == 0 and json.loads(out)["verdict"] == "has_cycle"


def test_generate_counts_and_contains(tmp_path):
    code, out = run("generate", "--m", "3", "--budget", "6", tmp=tmp_path)
    assert code == 0 and json.loads(out)["entries"] == 56
    code, out = run("--format", "csv", "counts", "--m", "3", "--budget", "6", tmp=tmp_path)
    assert out.splitlines()[0] == "k,arities,bars,count"
    code, out = run("contains", "--op", "1|1|1|1|1", "--m", "3", "--budget", "6", tmp=tmp_path)
    assert json.loads(out)["member"] == "unknown"
    code, out = run("contains", "--op", "12|213|314|41432", "--m", "3", "--oracle")
    assert json.loads(out)["member"] == "true"


def test_check_axioms_exit_zero():
    code, out = run("--seed", "3", "check-axioms", "--m", "1", "2", "--count", "10", "--unit-tokens", "4")
    assert code == 0 and json.loads(out)["failures"] == []


def test_lift_reports_non_maximal():
    code, out = run("lift", "--op", "1|1|1|1 :: (A) -> C")
    rep = json.loads(out)
    assert rep["lifted"] == "12|213|314|41432 :: (A,C,C,C) -> C"
    assert rep["maximal"] is False and code == 1


def test_verify_nerve(tmp_path):
    code, out = run("verify", "--suite", "nerve", "--max-vertices", "3", tmp=tmp_path)
    assert code == 0
    assert json.loads(out)["nerve"]["counterexamples"] == 0


@pytest.mark.parametrize("argv", [
    [],
    ["compose", "--op", "13"],
    ["join", "--x", "1|1", "--i", "5", "--y", "1", "--m", "2"],
    ["--format", "dot", "complexity", "--op", "1"],
    ["lift", "--op", "1 :: (A) -> C", "--m", "4"],
    ["nonsense"],
])
def test_usage_errors(argv, capsys):
    assert run(*argv)[0] == 2
