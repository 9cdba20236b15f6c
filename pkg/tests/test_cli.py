import subprocess
import sys

import pytest

from obdalab import rewriting
from obdalab.circuits import parse_circuit
from obdalab.cli import main
from obdalab.generators import disjoint_edges_hgp
from obdalab.hgp import format_hgp, parse_hgp
from obdalab.logic import parse_data, parse_ontology, parse_query
from obdalab.rewriting import eval_ndl, eval_pe, parse_ndl, parse_pe
from obdalab.translate import equiv_exists


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_answer_example1(capsys, data_dir):
    code, out, _ = run(capsys, "answer", data_dir / "example1.ont", data_dir / "example1.data",
                       data_dir / "example1.query")
    assert code == 0 and out == "c\n"


def test_answer_empty_data_and_boolean(capsys, data_dir, tmp_path):
    empty = tmp_path / "empty.data"
    empty.write_text("")
    code, out, _ = run(capsys, "answer", data_dir / "example1.ont", empty, data_dir / "example1.query")
    assert code == 0 and out == ""
    bq = tmp_path / "b.query"
    bq.write_text("q() :- Professor(z)\n")
    code, out, _ = run(capsys, "answer", data_dir / "example1.ont", data_dir / "example1.data", bq)
    assert out == "true\n"
    code, out, _ = run(capsys, "answer", data_dir / "example1.ont", empty, bq)
    assert out == "false\n"


def test_answer_depth_limit_flag(capsys, data_dir):
    code, out, _ = run(capsys, "answer", data_dir / "example1.ont", data_dir / "example1.data",
                       data_dir / "example1.query", "--depth-limit", "4")
    assert out == "c\n"


@pytest.mark.parametrize("target", ["pe", "ndl"])
def test_rewrite_example1(capsys, data_dir, target):
    code, out, _ = run(capsys, "rewrite", data_dir / "example1.ont", data_dir / "example1.query",
                       "--target", target)
    assert code == 0
    assert out.splitlines()[-1].startswith("# size=") and out.rstrip().endswith("disjuncts=4")
    data = parse_data((data_dir / "example1.data").read_text())
    parsed = parse_pe(out) if target == "pe" else parse_ndl(out)
    value = eval_pe(parsed, data) if target == "pe" else eval_ndl(parsed, data)
    assert value == {("c",)}


def test_rewrite_empty_ontology_echoes_query(capsys, data_dir, tmp_path):
    ont = tmp_path / "empty.ont"
    ont.write_text("")
    code, out, _ = run(capsys, "rewrite", ont, data_dir / "example1.query")
    assert out.splitlines()[0] == "q(x) :- (exists y,z: (worksOn(x,y) & involves(y,z) & Professor(z)))"
    assert "disjuncts=1" in out


def test_rewrite_encoded_disjoint_edges(capsys, tmp_path):
    hgp = tmp_path / "d3.hgp"
    hgp.write_text(format_hgp(disjoint_edges_hgp(3)))
    assert run(capsys, "encode", hgp, "--out-dir", tmp_path / "enc")[0] == 0
    code, out, _ = run(capsys, "rewrite", tmp_path / "enc" / "ontology.txt", tmp_path / "enc" / "query.txt")
    assert out.rstrip().endswith("disjuncts=8")
    code, out, _ = run(capsys, "rewrite", tmp_path / "enc" / "ontology.txt", tmp_path / "enc" / "query.txt",
                       "--target", "ndl")
    assert out.rstrip().endswith("disjuncts=8")


def test_encode_outputs_parse(capsys, data_dir, tmp_path):
    code, out, _ = run(capsys, "encode", data_dir / "two_edges.hgp", "--out-dir", tmp_path)
    assert code == 0
    parse_ontology((tmp_path / "ontology.txt").read_text())
    parse_query((tmp_path / "query.txt").read_text())
    parse_data((tmp_path / "data.txt").read_text())
    assert (tmp_path / "inputmap.txt").read_text().splitlines()[0] == "inputmap: v1 <- x1"


def test_eval_worked_example(capsys, data_dir):
    assert run(capsys, "eval", "hgp", data_dir / "two_edges.hgp", "010")[1] == "0\n"
    assert run(capsys, "eval", "hgp", data_dir / "two_edges.hgp", "011")[1] == "1\n"


def test_compile_then_eval(capsys, tmp_path):
    c = tmp_path / "c.txt"
    c.write_text("g1 = input x1; output g1\n")
    code, out, _ = run(capsys, "compile", c, "--to", "hgp3")
    (tmp_path / "p.hgp").write_text(out)
    assert run(capsys, "eval", "hgp", tmp_path / "p.hgp", "1")[1] == "1\n"
    assert run(capsys, "eval", "hgp", tmp_path / "p.hgp", "0")[1] == "0\n"
    code, out, _ = run(capsys, "compile", c, "--monotone")
    assert "!x" not in out


def test_hgp2circuit_round_trip(capsys, data_dir):
    code, out, _ = run(capsys, "hgp2circuit", data_dir / "two_edges.hgp")
    c = parse_circuit(out)
    h = parse_hgp((data_dir / "two_edges.hgp").read_text())
    assert equiv_exists(c, h)


def test_eval_circuit_and_nbp(capsys, tmp_path):
    c = tmp_path / "c.txt"
    c.write_text("g1 = input x1; g2 = input y1; g3 = and g1 g2; output g3\n")
    assert run(capsys, "eval", "circuit", c, "11")[1] == "1\n"
    assert run(capsys, "eval", "circuit", c, "10")[1] == "0\n"
    n = tmp_path / "p.nbp"
    n.write_text("source s\nsink t\nedge s v x1\nedge v t x2\n")
    assert run(capsys, "eval", "nbp", n, "11")[1] == "1\n"
    assert run(capsys, "eval", "nbp", n, "10")[1] == "0\n"


def test_errors_exit_1(capsys, tmp_path):
    bad = tmp_path / "bad.ont"
    bad.write_text("R(x,y) -> exists z: A(z)\n")
    q = tmp_path / "q.query"
    q.write_text("q(x) :- A(x)\n")
    code, _, err = run(capsys, "rewrite", bad, q)
    assert code == 1 and "non-unary premise" in err and "line 1" in err
    assert run(capsys, "answer", tmp_path / "missing", q, q)[0] == 1
    assert run(capsys, "eval", "hgp", tmp_path / "missing", "1")[0] == 1
    with pytest.raises(SystemExit) as info:
        main(["no-such-command"])
    assert info.value.code == 1


def test_selftest_vacuous(capsys, tmp_path, caplog):
    code, out, _ = run(capsys, "selftest", "--count", "0", "--out-dir", tmp_path)
    assert code == 0
    assert "pass vacuously" in caplog.text
    assert (tmp_path / "sizes.csv").read_text() == "instance,pe_size,ndl_size,disjuncts\n"


def test_selftest_reproducible(capsys, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    r1 = run(capsys, "selftest", "--count", "15", "--seed", "4", "--out-dir", a)
    r2 = run(capsys, "selftest", "--count", "15", "--seed", "4", "--out-dir", b)
    assert r1[0] == r2[0] == 0
    assert r1[1] == r2[1]
    assert (a / "sizes.csv").read_bytes() == (b / "sizes.csv").read_bytes()


def test_selftest_failure_exit_2(capsys, tmp_path, monkeypatch):
    original = rewriting._Context.saturate
    monkeypatch.setattr(rewriting._Context, "saturate",
                        lambda self, atom: original(self, atom)[:1])
    code, out, _ = run(capsys, "selftest", "--suite", "rewriter", "--out-dir", tmp_path)
    assert code == 2 and "FAIL" in out
    assert (tmp_path / "counterexamples").is_dir()


def test_console_entry_point(data_dir):
    proc = subprocess.run(
        [sys.executable, "-m", "obdalab.cli", "eval", "hgp", str(data_dir / "two_edges.hgp"), "010"],
        capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and proc.stdout == "0\n"
