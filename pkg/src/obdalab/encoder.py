"""Compile a hypergraph program into an ontology, a Boolean query and base data.

For a program with hyperedges E over vertices V the query has a variable per
vertex and per hyperedge; each A_e generates a depth-2 universal tree whose
anonymous elements can absorb exactly the query variables of one hyperedge.
The program accepts x iff the query is entailed by the base data plus A_v(a)
for every vertex whose label is true under x.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Sequence

from .chase import certain_answers
from .hgp import HypergraphProgram, Label, eval_hgp, parse_label
from .logic import (
    Atom,
    ConceptInclusion,
    ConjunctiveQuery,
    DataInstance,
    ExistentialRule,
    Ontology,
    ParseError,
)

CONSTANT = "a"


def vertex_pred(v: str) -> str:
    return f"Av_{v}"


def edge_pred(e: str) -> str:
    return f"Ae_{e}"


def marker_pred(e: str) -> str:
    return f"Be_{e}"


def role_pred(e: str) -> str:
    return f"Re_{e}"


@dataclass(frozen=True)
class Encoding:
    ontology: Ontology
    query: ConjunctiveQuery
    base_data: DataInstance
    input_map: dict[str, Label] = field(default_factory=dict)  # vertex id -> label
    num_vars: int = 0


def encode_hgp(h: HypergraphProgram) -> Encoding:
    if h.edge_vars:
        raise ValueError("normalize edge variables before encoding")
    edges = h.edge_map
    axioms = []
    for e, vs in h.edges:
        neighbours = [f for f, ws in h.edges if f != e and ws & vs]
        concl = [Atom(role_pred(f), ("x", "y")) for f in neighbours] + [Atom(marker_pred(e), ("y",))]
        axioms.append(ExistentialRule(edge_pred(e), tuple(concl)))
        axioms += [ConceptInclusion(marker_pred(e), vertex_pred(v)) for v in h.vertices if v in vs]
        axioms.append(ExistentialRule(marker_pred(e), (Atom(role_pred(e), ("y", "x")),)))
    datasig = {vertex_pred(v) for v in h.vertices}
    datasig |= {edge_pred(e) for e in edges} | {role_pred(e) for e in edges}
    atoms = [Atom(vertex_pred(v), (f"zv_{v}",)) for v in h.vertices]
    atoms += [Atom(role_pred(e), (f"ze_{e}", f"zv_{v}")) for e, vs in h.edges
              for v in h.vertices if v in vs]
    base = [Atom(edge_pred(e), (CONSTANT,)) for e in edges]
    base += [Atom(role_pred(e), (CONSTANT, CONSTANT)) for e in edges]
    return Encoding(
        Ontology(tuple(axioms), frozenset(datasig)),
        ConjunctiveQuery((), tuple(atoms)),
        DataInstance.from_facts(base, [CONSTANT]),
        dict(h.labels),
        h.num_vars,
    )


def data_for_input(enc: Encoding, x: Sequence[int]) -> DataInstance:
    if len(x) != enc.num_vars:
        raise ValueError(f"expected {enc.num_vars} input bits, got {len(x)}")
    extra = [Atom(vertex_pred(v), (CONSTANT,)) for v, lab in enc.input_map.items() if lab.evaluate(x)]
    return enc.base_data.with_facts(extra)


@dataclass
class EncodingReport:
    inputs_checked: int
    counterexamples: list[tuple[tuple[int, ...], bool, bool]]  # (x, program, entailed)

    @property
    def passed(self) -> bool:
        return not self.counterexamples


def verify_encoding(h: HypergraphProgram, max_vars: int = 8) -> EncodingReport:
    """Check program(x) == (D(x) and T entail q) for every input x, using the chase."""
    if h.num_vars > max_vars:
        raise ValueError(f"program has {h.num_vars} variables; bound is {max_vars}")
    enc = encode_hgp(h)
    bad = []
    count = 0
    for x in product((0, 1), repeat=h.num_vars):
        count += 1
        expected = eval_hgp(h, x)
        got = certain_answers(data_for_input(enc, x), enc.ontology, enc.query) == {()}
        if expected != got:
            bad.append((x, expected, got))
    return EncodingReport(count, bad)


def format_input_map(enc: Encoding) -> str:
    return "".join(f"inputmap: {v} <- {lab}\n" for v, lab in enc.input_map.items())


def parse_input_map(text: str) -> dict[str, Label]:
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 4 or parts[0] != "inputmap:" or parts[2] != "<-":
            raise ParseError("expected 'inputmap: <vertex> <- <label>'", lineno)
        try:
            out[parts[1]] = parse_label(parts[3])
        except ValueError as exc:
            raise ParseError(str(exc), lineno) from None
    return out
