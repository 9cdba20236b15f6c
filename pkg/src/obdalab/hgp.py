"""Hypergraph programs.

A program outputs 1 on x iff some set of pairwise disjoint hyperedges covers
every vertex whose label evaluates to 0 under x.  Hyperedges may also contain
vertices labelled 1.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Iterable, Mapping, Sequence

from .logic import ParseError, ValidationError


@dataclass(frozen=True)
class Label:
    kind: str  # "var", "neg" or "const"
    value: int  # variable index (0-based) or the constant

    def __post_init__(self):
        if self.kind not in ("var", "neg", "const"):
            raise ValidationError(f"unknown label kind {self.kind!r}")
        if self.kind == "const" and self.value not in (0, 1):
            raise ValidationError("constant label must be 0 or 1")

    def evaluate(self, x: Sequence[int]) -> int:
        if self.kind == "const":
            return self.value
        bit = int(bool(x[self.value]))
        return bit if self.kind == "var" else 1 - bit

    def __str__(self) -> str:
        if self.kind == "const":
            return str(self.value)
        return ("!" if self.kind == "neg" else "") + f"x{self.value + 1}"


def Var(i: int) -> Label:
    return Label("var", i)


def NegVar(i: int) -> Label:
    return Label("neg", i)


CONST0 = Label("const", 0)
CONST1 = Label("const", 1)


def parse_label(text: str) -> Label:
    m = re.match(r"^(!?)x(\d+)$", text)
    if m:
        idx = int(m.group(2))
        if idx < 1:
            raise ValidationError("variables are numbered from x1")
        return Label("neg" if m.group(1) else "var", idx - 1)
    if text in ("0", "1"):
        return Label("const", int(text))
    raise ValidationError(f"bad label {text!r}")


@dataclass(frozen=True)
class HypergraphProgram:
    vertices: tuple[str, ...]
    labels: Mapping[str, Label]
    edges: tuple[tuple[str, frozenset[str]], ...]
    num_vars: int
    # optional boolean guard per hyperedge: x_e = 0 forbids using e
    edge_vars: Mapping[str, int] = field(default_factory=dict)
    order: tuple[str, ...] | None = None
    tree: tuple[tuple[str, str], ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", tuple((e, frozenset(vs)) for e, vs in self.edges))
        object.__setattr__(self, "labels", dict(self.labels))
        object.__setattr__(self, "edge_vars", dict(self.edge_vars))
        vset = set(self.vertices)
        if len(vset) != len(self.vertices):
            raise ValidationError("duplicate vertex id")
        ids = [e for e, _ in self.edges]
        if len(set(ids)) != len(ids):
            raise ValidationError("duplicate hyperedge id")
        if set(self.labels) != vset:
            raise ValidationError("every vertex needs exactly one label")
        for v, lab in self.labels.items():
            if lab.kind != "const" and not 0 <= lab.value < self.num_vars:
                raise ValidationError(f"label {lab} of {v} is outside x1..x{self.num_vars}")
        for e, vs in self.edges:
            if not vs:
                raise ValidationError(f"hyperedge {e} is empty")
            if not vs <= vset:
                raise ValidationError(f"hyperedge {e} mentions unknown vertices {sorted(vs - vset)}")
        for e, i in self.edge_vars.items():
            if e not in ids:
                raise ValidationError(f"edgevar for unknown hyperedge {e}")
            if not 0 <= i < self.num_vars:
                raise ValidationError(f"edgevar x{i + 1} of {e} is outside x1..x{self.num_vars}")

    @property
    def size(self) -> int:
        return len(self.vertices) + len(self.edges)

    @property
    def edge_map(self) -> dict[str, frozenset[str]]:
        return dict(self.edges)

    def zeros(self, x: Sequence[int]) -> list[str]:
        return [v for v in self.vertices if self.labels[v].evaluate(x) == 0]

    def usable_edges(self, x: Sequence[int]) -> list[tuple[str, frozenset[str]]]:
        return [(e, vs) for e, vs in self.edges
                if e not in self.edge_vars or x[self.edge_vars[e]]]

    def incident(self, v: str) -> list[str]:
        return [e for e, vs in self.edges if v in vs]

    def __str__(self) -> str:
        return format_hgp(self)


def _check_input(h: HypergraphProgram, x: Sequence[int]) -> None:
    if len(x) != h.num_vars:
        raise ValueError(f"expected {h.num_vars} input bits, got {len(x)}")


def eval_hgp(h: HypergraphProgram, x: Sequence[int]) -> bool:
    """Backtracking: take the first uncovered zero vertex, branch on its usable hyperedges."""
    _check_input(h, x)
    zeros = h.zeros(x)
    usable = h.usable_edges(x)
    by_vertex: dict[str, list[frozenset[str]]] = {v: [] for v in zeros}
    for _, vs in usable:
        for v in vs:
            if v in by_vertex:
                by_vertex[v].append(vs)

    def search(i: int, used: frozenset[str]) -> bool:
        while i < len(zeros) and zeros[i] in used:
            i += 1
        if i == len(zeros):
            return True
        for vs in by_vertex[zeros[i]]:
            if not vs & used and search(i + 1, used | vs):
                return True
        return False

    return search(0, frozenset())


def eval_hgp_bruteforce(h: HypergraphProgram, x: Sequence[int]) -> bool:
    """Oracle: try every subset of usable hyperedges."""
    _check_input(h, x)
    zeros = set(h.zeros(x))
    usable = [vs for _, vs in h.usable_edges(x)]
    for k in range(len(usable) + 1):
        for chosen in combinations(usable, k):
            covered: set[str] = set()
            disjoint = True
            for vs in chosen:
                if covered & vs:
                    disjoint = False
                    break
                covered |= vs
            if disjoint and zeros <= covered:
                return True
    return False


def truth_table(h: HypergraphProgram, evaluator=eval_hgp) -> tuple[bool, ...]:
    return tuple(evaluator(h, x) for x in product((0, 1), repeat=h.num_vars))


def degree(h: HypergraphProgram) -> int:
    counts = {v: 0 for v in h.vertices}
    for _, vs in h.edges:
        for v in vs:
            counts[v] += 1
    return max(counts.values(), default=0)


def is_monotone(h: HypergraphProgram) -> bool:
    return all(lab.kind != "neg" for lab in h.labels.values())


class StructureError(ValidationError):
    def __init__(self, message: str, edge: str | None = None):
        self.edge = edge
        super().__init__(message)


def check_path_program(h: HypergraphProgram) -> None:
    """Raise StructureError unless every hyperedge is an interval of the declared order."""
    if h.order is None:
        raise StructureError("no vertex order declared")
    if sorted(h.order) != sorted(h.vertices):
        raise StructureError("declared order must list every vertex exactly once")
    pos = {v: i for i, v in enumerate(h.order)}
    for e, vs in h.edges:
        idx = sorted(pos[v] for v in vs)
        if idx[-1] - idx[0] + 1 != len(idx):
            raise StructureError(f"hyperedge {e} is not an interval of the declared order", e)


def check_tree_program(h: HypergraphProgram) -> None:
    """Raise StructureError unless every hyperedge spans a subtree of the declared tree."""
    if h.tree is None:
        raise StructureError("no underlying tree declared")
    adj: dict[str, set[str]] = {v: set() for v in h.vertices}
    for p, c in h.tree:
        if p not in adj or c not in adj:
            raise StructureError(f"tree edge {p}-{c} uses an unknown vertex")
        adj[p].add(c)
        adj[c].add(p)
    if len(h.tree) != len(h.vertices) - 1 or (h.vertices and len(_reach(adj, h.vertices[0], adj)) != len(adj)):
        raise StructureError("declared tree must span all vertices without cycles")
    for e, vs in h.edges:
        start = next(iter(vs))
        if _reach(adj, start, vs) != vs:
            raise StructureError(f"hyperedge {e} is not a subtree of the declared tree", e)


def _reach(adj: dict[str, set[str]], start: str, allowed: Iterable[str]) -> set[str]:
    allowed = set(allowed)
    seen, stack = {start}, [start]
    while stack:
        for u in adj[stack.pop()] & allowed:
            if u not in seen:
                seen.add(u)
                stack.append(u)
    return seen


def is_path_program(h: HypergraphProgram) -> bool:
    try:
        check_path_program(h)
    except StructureError:
        return False
    return True


def is_tree_program(h: HypergraphProgram) -> bool:
    try:
        check_tree_program(h)
    except StructureError:
        return False
    return True


def normalize_edge_variables(h: HypergraphProgram) -> HypergraphProgram:
    """Replace each guarded hyperedge e by a plain one using two fresh vertices.

    v_e (labelled 1) joins e, u_e (labelled x_e) gets the new edge {v_e, u_e}:
    when x_e = 0 the new edge must cover u_e and so e becomes unusable.
    """
    if not h.edge_vars:
        return h
    taken = set(h.vertices) | {e for e, _ in h.edges}

    def fresh(stem: str) -> str:
        name = stem
        while name in taken:
            name += "_"
        taken.add(name)
        return name

    vertices = list(h.vertices)
    labels = dict(h.labels)
    edges = []
    extra = []
    for e, vs in h.edges:
        if e not in h.edge_vars:
            edges.append((e, vs))
            continue
        v_e, u_e = fresh(f"v_{e}"), fresh(f"u_{e}")
        vertices += [v_e, u_e]
        labels[v_e] = CONST1
        labels[u_e] = Var(h.edge_vars[e])
        edges.append((e, vs | {v_e}))
        extra.append((fresh(f"{e}_guard"), frozenset({v_e, u_e})))
    return HypergraphProgram(tuple(vertices), labels, tuple(edges + extra), h.num_vars)


# ---------------------------------------------------------------------------
# file format


def parse_hgp(text: str) -> HypergraphProgram:
    num_vars = None
    vertices: list[str] = []
    labels: dict[str, Label] = {}
    edges: list[tuple[str, frozenset[str]]] = []
    edge_vars: dict[str, int] = {}
    order = None
    tree: list[tuple[str, str]] | None = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        parts = raw.split("#", 1)[0].split()
        if not parts:
            continue
        kw, args = parts[0], parts[1:]
        try:
            if kw == "vars" and len(args) == 1:
                num_vars = int(args[0])
            elif kw == "vertex" and len(args) == 2:
                if args[0] in labels:
                    raise ValidationError(f"duplicate vertex {args[0]}")
                vertices.append(args[0])
                labels[args[0]] = parse_label(args[1])
            elif kw == "edge" and len(args) >= 2:
                edges.append((args[0], frozenset(args[1:])))
            elif kw == "edgevar" and len(args) == 2:
                lab = parse_label(args[1])
                if lab.kind != "var":
                    raise ValidationError("edgevar takes a plain variable")
                edge_vars[args[0]] = lab.value
            elif kw == "order":
                order = tuple(args)
            elif kw == "tree" and len(args) % 2 == 0:
                tree = (tree or []) + [(args[i], args[i + 1]) for i in range(0, len(args), 2)]
            else:
                raise ValidationError(f"cannot parse {raw.strip()!r}")
        except ValueError as exc:
            raise ParseError(str(exc), lineno) from None
    if num_vars is None:
        num_vars = max((lab.value + 1 for lab in labels.values() if lab.kind != "const"), default=0)
        num_vars = max([num_vars, *(i + 1 for i in edge_vars.values())])
    try:
        return HypergraphProgram(tuple(vertices), labels, tuple(edges), num_vars, edge_vars,
                                 order, None if tree is None else tuple(tree))
    except ValidationError as exc:
        raise ParseError(str(exc)) from None


def format_hgp(h: HypergraphProgram) -> str:
    lines = [f"vars {h.num_vars}"]
    lines += [f"vertex {v} {h.labels[v]}" for v in h.vertices]
    lines += [f"edge {e} {' '.join(sorted(vs, key=h.vertices.index))}" for e, vs in h.edges]
    lines += [f"edgevar {e} x{i + 1}" for e, i in h.edge_vars.items()]
    if h.order is not None:
        lines.append("order " + " ".join(h.order))
    if h.tree is not None:
        lines.append("tree " + " ".join(f"{p} {c}" for p, c in h.tree))
    return "".join(l + "\n" for l in lines)
