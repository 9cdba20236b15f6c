"""Hypergraph programs <-> circuits with certificate inputs.

``hgp_to_np_circuit`` builds C(x, y) with one y-input per hyperedge that
checks "the chosen hyperedges are disjoint and cover every zero".
``circuit_to_hgp3`` goes the other way with degree-3 gadgets, so that the
program outputs 1 on x iff C(x, y) = 1 for some y.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from .circuits import Circuit, CircuitBuilder, Gate, Not, eval_circuit
from .hgp import CONST0, CONST1, HypergraphProgram, Label, NegVar, Var, eval_hgp


def hgp_to_np_circuit(h: HypergraphProgram) -> Circuit:
    edges = list(h.edges)
    b = CircuitBuilder(h.num_vars, len(edges))
    clauses: list[int] = []
    for (i, (_, a)), (j, (_, c)) in _pairs(list(enumerate(edges))):
        if a & c:
            clauses.append(b.add(Gate("or", (b.add(Not(b.y(i))), b.add(Not(b.y(j)))))))
    for v in h.vertices:
        lab = h.labels[v]
        if lab == CONST1:
            continue
        lits = []
        if lab.kind == "var":
            lits.append(b.x(lab.value))
        elif lab.kind == "neg":
            lits.append(b.add(Not(b.x(lab.value))))
        lits += [b.y(i) for i, (_, vs) in enumerate(edges) if v in vs]
        clauses.append(b.balanced("or", lits, 0))
    return b.build(b.balanced("and", clauses, 1))


def _pairs(items):
    for i in range(len(items)):
        for j in range(i + 1, len(items)):
            yield items[i], items[j]


@dataclass
class _Gadgets:
    vertices: list[str]
    labels: dict[str, Label]
    members: dict[str, list[str]]  # hyperedge -> vertices, insertion ordered

    def vertex(self, name: str, label: Label, *edges: str) -> str:
        self.vertices.append(name)
        self.labels[name] = label
        for e in edges:
            self.members.setdefault(e, []).append(name)
        return name

    def edge(self, name: str, *vs: str) -> None:
        self.members.setdefault(name, []).extend(vs)


def circuit_to_hgp3(c: Circuit, monotone: bool = False) -> HypergraphProgram:
    """Degree-3 program: e_i in the cover <=> gate i evaluates to 1.

    Gate vertex g_i (label 0) lies only in e_i and ebar_i, so exactly one of
    the pair is chosen; label-1 vertices shared between two hyperedges make
    them mutually exclusive.  In monotone mode the !x forcing vertices are
    dropped, giving exists y, x' <= x: C(x', y) = 1.
    """
    if any(g.op == "ormulti" for g in c.gates):
        raise ValueError("unbounded fan-in or gates must be expanded first")
    gd = _Gadgets([], {}, {})
    e = [f"e{i + 1}" for i in range(len(c.gates))]
    eb = [f"eb{i + 1}" for i in range(len(c.gates))]
    for i, g in enumerate(c.gates):
        gd.vertex(f"g{i + 1}", CONST0, e[i], eb[i])
        if g.op == "input":
            cls, k = g.args
            if cls == "x":
                if not monotone:
                    gd.vertex(f"nx{i + 1}", NegVar(k), e[i])
                gd.vertex(f"px{i + 1}", Var(k), eb[i])
        elif g.op == "const":
            # a private zero forces the matching hyperedge
            gd.vertex(f"k{i + 1}", CONST0, e[i] if g.args[0] else eb[i])
        elif g.op == "not":
            # e_i excludes e_j and eb_i excludes eb_j, so e_i <=> eb_j
            (j,) = g.args
            gd.vertex(f"n{i + 1}a", CONST1, e[i], e[j])
            gd.vertex(f"n{i + 1}b", CONST1, eb[i], eb[j])
        else:
            # or: e_i <=> e_j or e_j'; and is the same with every e / ebar swapped
            pos, neg = (e, eb) if g.op == "or" else (eb, e)
            w = gd.vertex(f"w{i + 1}", CONST0, neg[i])
            for side, j in zip("ab", g.args):
                gd.vertex(f"l{i + 1}{side}", CONST1, pos[j], neg[i])
                h = gd.vertex(f"h{i + 1}{side}", CONST1, neg[j])
                gd.edge(f"hw{i + 1}{side}", h, w)
    gd.vertex("out", CONST0, e[c.output])
    edges = tuple((name, frozenset(vs)) for name, vs in gd.members.items())
    order = {name: k for k, name in enumerate(e + eb)}
    edges = tuple(sorted(edges, key=lambda ev: (order.get(ev[0], len(order)), ev[0])))
    return HypergraphProgram(tuple(gd.vertices), gd.labels, edges, c.n)


class BoundExceeded(ValueError):
    pass


def exists_projection(c: Circuit, x) -> bool:
    return any(eval_circuit(c, x, y) for y in product((0, 1), repeat=c.m))


def monotone_projection(c: Circuit, x) -> bool:
    """exists y and x' <= x with C(x', y) = 1."""
    ones = [i for i, b in enumerate(x) if b]
    for sub in product((0, 1), repeat=len(ones)):
        xp = [0] * c.n
        for i, bit in zip(ones, sub):
            xp[i] = bit
        if exists_projection(c, xp):
            return True
    return False


def equiv_exists(c: Circuit, h: HypergraphProgram, max_n: int = 10, max_m: int = 6,
                 monotone: bool = False) -> bool:
    """For all x: (exists y: C(x, y) = 1) == h(x); exhaustive."""
    if c.n > max_n or c.m > max_m:
        raise BoundExceeded(f"circuit has {c.n} x-inputs and {c.m} y-inputs; bounds are {max_n}, {max_m}")
    if h.num_vars != c.n:
        return False
    proj = monotone_projection if monotone else exists_projection
    return all(proj(c, x) == eval_hgp(h, x) for x in product((0, 1), repeat=c.n))


def counterexample(c: Circuit, h: HypergraphProgram, monotone: bool = False):
    proj = monotone_projection if monotone else exists_projection
    for x in product((0, 1), repeat=c.n):
        if proj(c, x) != eval_hgp(h, x):
            return x
    return None
