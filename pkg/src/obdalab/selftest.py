"""Randomized differential suites: rewriter, encoder, translators.

Each suite draws its instances from ``random.Random(f"{seed}:{suite}")`` so
suites are reproducible independently of one another.  Mismatches are
written as re-loadable files under ``<out_dir>/counterexamples``.
"""
from __future__ import annotations

import csv
import logging
import random
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path

from . import rewriting
from .chase import certain_answers, ontology_depth
from .circuits import format_circuit, negations_only_on_y
from .encoder import encode_hgp, verify_encoding
from .generators import random_circuit, random_hgp, random_rewriting_instance
from .hgp import degree, format_hgp
from .logic import format_data, format_ontology, format_query
from .translate import circuit_to_hgp3, counterexample, hgp_to_np_circuit

log = logging.getLogger(__name__)

SUITES = ("rewriter", "encoder", "translators")
DEFAULT_COUNTS = {"rewriter": 200, "encoder": 100, "translators": 100}


@dataclass
class SuiteResult:
    suite: str
    checked: int = 0
    failures: list[str] = field(default_factory=list)
    sizes: list[tuple[str, int, int, int]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures


class _Dumper:
    def __init__(self, out_dir: Path | None, suite: str):
        self.root = None if out_dir is None else Path(out_dir) / "counterexamples"
        self.suite = suite

    def __call__(self, instance: str, files: dict[str, str]) -> str:
        if self.root is None:
            return instance
        d = self.root / f"{self.suite}-{instance}"
        d.mkdir(parents=True, exist_ok=True)
        for name, text in files.items():
            (d / name).write_text(text)
        return str(d)


def _independent_sets(h) -> int:
    edges = [vs for _, vs in h.edges]
    return sum(
        1
        for r in range(len(edges) + 1)
        for s in combinations(edges, r)
        if all(not (a & b) for a, b in combinations(s, 2))
    )


def run_rewriter(seed: int, count: int, out_dir: Path | None = None) -> SuiteResult:
    rng = random.Random(f"{seed}:rewriter")
    res = SuiteResult("rewriter")
    dump = _Dumper(out_dir, "rewriter")
    for i in range(count):
        ont, q, data = random_rewriting_instance(rng)
        name = f"r{i:04d}"
        expected = certain_answers(data, ont, q)
        pe = rewriting.pe_rewriting(q, ont)
        ndl = rewriting.pe_to_ndl(pe)
        nv = len(q.variables)
        problems = []
        got_pe, got_ndl = rewriting.eval_pe(pe, data), rewriting.eval_ndl(ndl, data)
        if got_pe != expected:
            problems.append(f"pe gives {sorted(got_pe)}, certain answers {sorted(expected)}")
        if got_ndl != expected:
            problems.append(f"ndl gives {sorted(got_ndl)}, certain answers {sorted(expected)}")
        if certain_answers(data, ont, q, nv + 1) != certain_answers(data, ont, q, nv + 3):
            problems.append(f"chase answers differ at depth {nv + 1} and {nv + 3}")
        res.checked += 1
        res.sizes.append((name, rewriting.size_of(pe), rewriting.size_of(ndl), len(pe.disjuncts)))
        if problems:
            where = dump(name, {
                "ontology.txt": format_ontology(ont),
                "query.txt": format_query(q),
                "data.txt": format_data(data),
                "rewriting.pe": rewriting.format_pe(pe),
            })
            res.failures.append(f"{where}: " + "; ".join(problems))
    return res


def run_encoder(seed: int, count: int, out_dir: Path | None = None) -> SuiteResult:
    rng = random.Random(f"{seed}:encoder")
    res = SuiteResult("encoder")
    dump = _Dumper(out_dir, "encoder")
    for i in range(count):
        h = random_hgp(rng)
        name = f"h{i:04d}"
        enc = encode_hgp(h)
        problems = []
        report = verify_encoding(h)
        for x, prog, ent in report.counterexamples:
            problems.append(f"x={''.join(map(str, x))}: program {int(prog)}, entailed {int(ent)}")
        if h.edges and ontology_depth(enc.ontology) != 2:
            problems.append(f"ontology depth {ontology_depth(enc.ontology)}, expected 2")
        tws = rewriting.tree_witnesses(enc.query, enc.ontology)
        pe = rewriting.pe_rewriting(enc.query, enc.ontology)
        if len(tws) != len(h.edges):
            problems.append(f"{len(tws)} tree witnesses for {len(h.edges)} hyperedges")
        if len(pe.disjuncts) != _independent_sets(h):
            problems.append(f"{len(pe.disjuncts)} disjuncts, {_independent_sets(h)} independent sets")
        res.checked += 1
        ndl = rewriting.ndl_rewriting(enc.query, enc.ontology)
        res.sizes.append((name, rewriting.size_of(pe), rewriting.size_of(ndl), len(pe.disjuncts)))
        if problems:
            where = dump(name, {"program.hgp": format_hgp(h)})
            res.failures.append(f"{where}: " + "; ".join(problems))
    return res


def run_translators(seed: int, count: int, out_dir: Path | None = None) -> SuiteResult:
    rng = random.Random(f"{seed}:translators")
    res = SuiteResult("translators")
    dump = _Dumper(out_dir, "translators")
    for i in range(count):
        c = random_circuit(rng)
        for mono in (False, True):
            name = f"c{i:04d}{'m' if mono else ''}"
            h = circuit_to_hgp3(c, monotone=mono)
            problems = []
            x = counterexample(c, h, monotone=mono)
            if x is not None:
                problems.append(f"x={''.join(map(str, x))}: projection and program disagree")
            if degree(h) > 3:
                problems.append(f"degree {degree(h)} > 3")
            res.checked += 1
            if problems:
                where = dump(name, {"circuit.txt": format_circuit(c), "program.hgp": format_hgp(h)})
                res.failures.append(f"{where}: " + "; ".join(problems))
        for mono in (False, True):
            name = f"h{i:04d}{'m' if mono else ''}"
            h = random_hgp(rng, max_vertices=8, max_edges=5, monotone=mono)
            c = hgp_to_np_circuit(h)
            problems = []
            x = counterexample(c, h, monotone=mono)
            if x is not None:
                problems.append(f"x={''.join(map(str, x))}: projection and program disagree")
            if mono and not negations_only_on_y(c):
                problems.append("monotone program gave a circuit negating an x-input")
            res.checked += 1
            if problems:
                where = dump(name, {"program.hgp": format_hgp(h), "circuit.txt": format_circuit(c)})
                res.failures.append(f"{where}: " + "; ".join(problems))
    return res


RUNNERS = {"rewriter": run_rewriter, "encoder": run_encoder, "translators": run_translators}


def run_selftest(suite: str = "all", seed: int = 0, count: int | None = None,
                 out_dir: Path | None = None) -> list[SuiteResult]:
    names = SUITES if suite == "all" else (suite,)
    if count == 0:
        log.warning("--count=0: no instances generated, suites pass vacuously")
    results = [RUNNERS[s](seed, DEFAULT_COUNTS[s] if count is None else count, out_dir) for s in names]
    if out_dir is not None:
        write_sizes(results, Path(out_dir) / "sizes.csv")
    return results


def write_sizes(results: list[SuiteResult], path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    rows = sorted(row for r in results for row in r.sizes)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("instance", "pe_size", "ndl_size", "disjuncts"))
        w.writerows(rows)


def format_report(results: list[SuiteResult]) -> str:
    lines = []
    for r in results:
        lines.append(f"{r.suite}: {'PASS' if r.passed else 'FAIL'} ({r.checked} checks, {len(r.failures)} failures)")
        lines += [f"  {f}" for f in r.failures]
    return "".join(l + "\n" for l in lines)
