"""Acceptance criteria 1-7, each at its stated scale and time budget.

Each test records one ``[PASS]``/``[FAIL]`` line; the lines are printed in the
pytest terminal summary, and ``python tests/test_acceptance.py`` prints them
directly.
"""
from __future__ import annotations

import csv
import io
import math
import random
import statistics
import sys
import time
from contextlib import redirect_stdout
from pathlib import Path

from obdalab.chase import certain_answers, ontology_depth
from obdalab.cli import main
from obdalab.encoder import encode_hgp, verify_encoding
from obdalab.generators import (
    disjoint_edges_hgp,
    enumerate_small_circuits,
    random_circuit,
    random_hgp,
    random_rewriting_instance,
)
from obdalab.hgp import degree, eval_hgp_bruteforce, truth_table
from obdalab.logic import Ontology, parse_data, parse_query
from obdalab.rewriting import (
    eval_ndl,
    eval_pe,
    ndl_rewriting,
    parse_ndl,
    parse_pe,
    pe_rewriting,
    pe_to_ndl,
    size_of,
)
from obdalab.translate import circuit_to_hgp3, counterexample, hgp_to_np_circuit

DATA = Path(__file__).parent / "data"
SEED = 0
RESULTS: list[str] = []


def record(num: int, title: str, ok: bool, elapsed: float, budget: float, detail: str) -> None:
    ok = ok and elapsed < budget
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {num}: {title} -- {detail}; {elapsed:.2f}s (budget {budget:g}s)"
    RESULTS.append(line)
    print(line)
    assert ok, line


def _cli(*argv) -> str:
    buf = io.StringIO()
    with redirect_stdout(buf):
        code = main([str(a) for a in argv])
    assert code == 0
    return buf.getvalue()


def test_criterion_1_example_golden():
    t = time.perf_counter()
    ont_f, data_f, q_f = DATA / "example1.ont", DATA / "example1.data", DATA / "example1.query"
    data = parse_data(data_f.read_text())
    q = parse_query(q_f.read_text())
    answered = _cli("answer", ont_f, data_f, q_f).splitlines()
    bare = certain_answers(data, Ontology(), q)
    pe = eval_pe(parse_pe(_cli("rewrite", ont_f, q_f, "--target", "pe")), data)
    ndl = eval_ndl(parse_ndl(_cli("rewrite", ont_f, q_f, "--target", "ndl")), data)
    ok = answered == ["c"] and bare == set() and pe == {("c",)} and ndl == {("c",)}
    record(1, "example golden test", ok, time.perf_counter() - t, 1.0,
           f"answer={answered}, T=empty gives {sorted(bare)}, pe={sorted(pe)}, ndl={sorted(ndl)}")


def _rewriting_suite():
    rng = random.Random(f"{SEED}:rewriter")
    return [random_rewriting_instance(rng) for _ in range(200)]


def test_criterion_2_rewriting_sound_and_complete():
    t = time.perf_counter()
    agree = 0
    suite = _rewriting_suite()
    for ont, q, data in suite:
        expected = certain_answers(data, ont, q)
        f = pe_rewriting(q, ont)
        if eval_pe(f, data) == expected and eval_ndl(pe_to_ndl(f), data) == expected:
            agree += 1
    record(2, "rewriting soundness/completeness", agree == len(suite), time.perf_counter() - t, 300,
           f"{agree}/{len(suite)} instances agree (pe and ndl vs chase)")


def test_criterion_3_chase_depth_stability():
    t = time.perf_counter()
    suite = _rewriting_suite()
    stable = 0
    for ont, q, data in suite:
        n = len(q.variables)
        stable += certain_answers(data, ont, q, n + 1) == certain_answers(data, ont, q, n + 3)
    record(3, "chase depth stability", stable == len(suite), time.perf_counter() - t, 300,
           f"{stable}/{len(suite)} identical at |vars|+1 and |vars|+3")


def test_criterion_4_encoding_claim():
    t = time.perf_counter()
    rng = random.Random(f"{SEED}:encoder")
    passed = depth_ok = inputs = 0
    for _ in range(100):
        h = random_hgp(rng, max_vertices=6, max_edges=4, max_vars=6)
        report = verify_encoding(h)
        inputs += report.inputs_checked
        passed += report.passed
        depth_ok += (not h.edges) or ontology_depth(encode_hgp(h).ontology) == 2
    record(4, "encoding claim", passed == 100 and depth_ok == 100, time.perf_counter() - t, 600,
           f"{passed}/100 programs pass on {inputs} inputs, depth 2 in {depth_ok}/100")


def test_criterion_5_circuit_hgp_translations():
    t = time.perf_counter()
    families = [
        ("x1,x2,y1 + <=3 gates", enumerate_small_circuits((("x", 0), ("x", 1), ("y", 0)), 3)),
        ("x1..x4,y1,y2 + <=2 gates", enumerate_small_circuits(
            (("x", 0), ("x", 1), ("x", 2), ("x", 3), ("y", 0), ("y", 1)), 2)),
    ]
    rng = random.Random(f"{SEED}:acceptance-circuits")
    families.append(("random 8-gate", (random_circuit(rng, 8, 4, 2) for _ in range(3000))))
    counts, bad_a, max_deg = [], 0, 0
    for name, circuits in families:
        k = 0
        for c in circuits:
            k += 1
            for mono in (False, True):
                h = circuit_to_hgp3(c, monotone=mono)
                max_deg = max(max_deg, degree(h))
                bad_a += counterexample(c, h, monotone=mono) is not None
        counts.append(f"{k} {name}")
    bad_b = 0
    rng = random.Random(f"{SEED}:acceptance-hgp")
    for i in range(100):
        h = random_hgp(rng, max_vertices=8, max_edges=5, max_vars=6)
        bad_b += counterexample(hgp_to_np_circuit(h), h) is not None
        m = random_hgp(rng, max_vertices=8, max_edges=5, max_vars=6, monotone=True)
        bad_b += counterexample(hgp_to_np_circuit(m), m, monotone=True) is not None
    ok = bad_a == 0 and max_deg <= 3 and bad_b == 0
    record(5, "circuit <-> hypergraph program", ok, time.perf_counter() - t, 600,
           f"(a) {', '.join(counts)}: {bad_a} mismatches over both modes, max degree {max_deg}; "
           f"(b) 100+100 programs: {bad_b} mismatches")


def test_criterion_6_exponential_blowup(tmp_path):
    t = time.perf_counter()
    rows = []
    for n in range(1, 13):
        enc = encode_hgp(disjoint_edges_hgp(n))
        pe = pe_rewriting(enc.query, enc.ontology)
        ndl = ndl_rewriting(enc.query, enc.ontology)
        rows.append((n, size_of(pe), size_of(ndl), len(pe.disjuncts)))
    path = tmp_path / "blowup.csv"
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("n", "pe_size", "ndl_size", "disjuncts"))
        w.writerows(rows)
    with open(path) as fh:
        table = [{k: int(v) for k, v in r.items()} for r in csv.DictReader(fh)]
    exact = all(r["disjuncts"] == 2 ** r["n"] for r in table)
    fit = statistics.linear_regression([math.log(r["n"]) for r in table],
                                       [math.log(r["ndl_size"]) for r in table])
    ok = exact and fit.slope <= 2
    record(6, "exponential PE blow-up", ok, time.perf_counter() - t, 600,
           f"disjuncts=2^n for n=1..12: {exact}; NDL size {table[0]['ndl_size']}..{table[-1]['ndl_size']}, "
           f"log-log slope {fit.slope:.2f}; PE size at n=12: {table[-1]['pe_size']}")


def test_criterion_7_hgp_oracle():
    t = time.perf_counter()
    rng = random.Random(f"{SEED}:acceptance-oracle")
    total = agree = 0
    for i in range(1300):
        h = random_hgp(rng, max_vertices=12, max_vars=8, num_edges=i % 13)
        total += 1
        agree += truth_table(h) == truth_table(h, eval_hgp_bruteforce)
    record(7, "eval_hgp vs cover-enumeration oracle", agree == total, time.perf_counter() - t, 600,
           f"{agree}/{total} programs (|E| = 0..12, 100 each; n <= 8) agree on all inputs")


if __name__ == "__main__":
    import pytest

    sys.exit(pytest.main([__file__, "-q", "-s"]))
