"""Seeded random instances for the differential test suites.

Every generator takes a ``random.Random`` so that a single seed fixes a
whole suite.
"""
from __future__ import annotations

import random
from itertools import product

from .circuits import Circuit, Gate, Input
from .hgp import CONST0, CONST1, HypergraphProgram, NegVar, Var
from .logic import (
    Atom,
    ConceptInclusion,
    ConjunctiveQuery,
    DataInstance,
    ExistentialRule,
    Ontology,
    RoleInclusion,
)

UNARY = ("A", "B", "C")
BINARY = ("R", "S")
QUERY_VARS = ("x", "y", "z", "u")
CONSTANTS = ("a", "b", "c")


def random_axiom(rng: random.Random):
    kind = rng.choice(("concept", "role", "exists", "exists"))
    if kind == "concept":
        sub, sup = rng.sample(UNARY, 2)
        return ConceptInclusion(sub, sup)
    if kind == "role":
        sub, sup = rng.choice(BINARY), rng.choice(BINARY)
        inverted = rng.random() < 0.5 or sub == sup
        return RoleInclusion(sub, sup, inverted)
    role = rng.choice(BINARY)
    concl = [Atom(role, ("x", "y") if rng.random() < 0.6 else ("y", "x"))]
    if rng.random() < 0.6:
        concl.append(Atom(rng.choice(UNARY), ("y",)))
    if rng.random() < 0.2:
        concl.append(Atom(rng.choice(UNARY), ("x",)))
    return ExistentialRule(rng.choice(UNARY), tuple(dict.fromkeys(concl)))


def random_ontology(rng: random.Random, max_axioms: int = 4) -> Ontology:
    return Ontology(tuple(random_axiom(rng) for _ in range(rng.randint(0, max_axioms))))


def random_query(rng: random.Random, max_atoms: int = 4) -> ConjunctiveQuery:
    atoms = []
    for _ in range(rng.randint(1, max_atoms)):
        if rng.random() < 0.4:
            atoms.append(Atom(rng.choice(UNARY), (rng.choice(QUERY_VARS),)))
        else:
            atoms.append(Atom(rng.choice(BINARY), (rng.choice(QUERY_VARS), rng.choice(QUERY_VARS))))
    used = list(dict.fromkeys(v for a in atoms for v in a.args))
    answer = tuple(v for v in used if rng.random() < 0.35)[:2]
    return ConjunctiveQuery(answer, tuple(atoms))


def random_data(rng: random.Random, max_constants: int = 3, max_facts: int = 5) -> DataInstance:
    consts = CONSTANTS[: rng.randint(1, max_constants)]
    facts = []
    for _ in range(rng.randint(0, max_facts)):
        if rng.random() < 0.5:
            facts.append(Atom(rng.choice(UNARY), (rng.choice(consts),)))
        else:
            facts.append(Atom(rng.choice(BINARY), (rng.choice(consts), rng.choice(consts))))
    return DataInstance.from_facts(facts, consts)


def random_rewriting_instance(rng: random.Random):
    return random_ontology(rng), random_query(rng), random_data(rng)


def random_label(rng: random.Random, num_vars: int):
    r = rng.random()
    if r < 0.1 or num_vars == 0:
        return rng.choice((CONST0, CONST1))
    i = rng.randrange(num_vars)
    return NegVar(i) if r < 0.3 else Var(i)


def random_hgp(rng: random.Random, max_vertices: int = 6, max_edges: int = 4,
               max_vars: int = 6, monotone: bool = False,
               num_edges: int | None = None) -> HypergraphProgram:
    nv = rng.randint(1, max_vertices)
    n = rng.randint(1, max_vars)
    vertices = tuple(f"v{i + 1}" for i in range(nv))
    labels = {}
    for v in vertices:
        lab = random_label(rng, n)
        if monotone and lab.kind == "neg":
            lab = Var(lab.value)
        labels[v] = lab
    edges = []
    for k in range(rng.randint(0, max_edges) if num_edges is None else num_edges):
        members = frozenset(v for v in vertices if rng.random() < 0.35) or frozenset({rng.choice(vertices)})
        edges.append((f"e{k + 1}", members))
    return HypergraphProgram(vertices, labels, tuple(edges), n)


def disjoint_edges_hgp(n: int) -> HypergraphProgram:
    """n pairwise disjoint single-vertex hyperedges; 2^n independent sets."""
    vertices = tuple(f"v{i + 1}" for i in range(n))
    return HypergraphProgram(
        vertices,
        {v: Var(i) for i, v in enumerate(vertices)},
        tuple((f"e{i + 1}", frozenset({v})) for i, v in enumerate(vertices)),
        n,
    )


def random_circuit(rng: random.Random, max_gates: int = 8, max_x: int = 4, max_y: int = 2) -> Circuit:
    n, m = rng.randint(1, max_x), rng.randint(0, max_y)
    inputs = [("x", k) for k in range(n)] + [("y", k) for k in range(m)]
    gates = [Input(cls, k) for cls, k in rng.sample(inputs, rng.randint(1, min(len(inputs), max_gates)))]
    while len(gates) < max_gates and rng.random() < 0.9:
        op = rng.choice(("not", "and", "or", "and", "or"))
        if op == "not":
            gates.append(Gate("not", (rng.randrange(len(gates)),)))
        else:
            gates.append(Gate(op, (rng.randrange(len(gates)), rng.randrange(len(gates)))))
    return Circuit(tuple(gates), len(gates) - 1, n, m)


def enumerate_small_circuits(inputs=(("x", 0), ("x", 1), ("y", 0)), extra_gates: int = 2):
    """Every circuit over the given input gates plus up to ``extra_gates`` gates."""
    n = 1 + max((k for c, k in inputs if c == "x"), default=-1)
    m = 1 + max((k for c, k in inputs if c == "y"), default=-1)
    base = [Input(cls, k) for cls, k in inputs]

    def grow(gates: list[Gate], left: int):
        for out in range(len(gates)):
            yield Circuit(tuple(gates), out, n, m)
        if not left:
            return
        k = len(gates)
        choices = [Gate("not", (i,)) for i in range(k)]
        choices += [Gate(op, (i, j)) for op in ("and", "or") for i, j in product(range(k), repeat=2) if i <= j]
        for g in choices:
            yield from grow([*gates, g], left - 1)

    yield from grow(base, extra_gates)
