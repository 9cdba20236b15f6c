"""Bounded universal models and certain answers.

The chase here is the one-witness-per-(element, rule) variant: every element
whose labels contain the premise of an existential rule gets exactly one
child for that rule, so the anonymous part of a model is a forest of copies
of universal trees hanging off the data constants.
"""
from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Iterator, Mapping

from .logic import (
    Atom,
    ConceptInclusion,
    ConjunctiveQuery,
    DataInstance,
    ExistentialRule,
    Ontology,
    RoleInclusion,
    query_components,
)


class Closure:
    """Entailment between single atoms induced by an ontology.

    ``labels(S)`` closes a set of unary labels under concept inclusions and
    the x-side conclusions of existential rules; ``roles(R, forward)`` gives
    every signed role implied by ``R``.
    """

    def __init__(self, ontology: Ontology):
        self.ontology = ontology
        self._unary_up: dict[str, set[str]] = defaultdict(set)
        self._role_up: dict[str, set[tuple[str, bool]]] = defaultdict(set)
        for ax in ontology.axioms:
            if isinstance(ax, ConceptInclusion):
                self._unary_up[ax.sub].add(ax.sup)
            elif isinstance(ax, RoleInclusion):
                self._role_up[ax.sub].add((ax.sup, not ax.inverted))
            else:
                self._unary_up[ax.premise].update(ax.x_labels)
        self.rules = ontology.existential_rules
        self._label_cache: dict[frozenset[str], frozenset[str]] = {}
        self._role_cache: dict[tuple[str, bool], frozenset[tuple[str, bool]]] = {}

    def labels(self, start: Iterable[str]) -> frozenset[str]:
        start = frozenset(start)
        hit = self._label_cache.get(start)
        if hit is not None:
            return hit
        out, stack = set(start), list(start)
        while stack:
            for sup in self._unary_up.get(stack.pop(), ()):
                if sup not in out:
                    out.add(sup)
                    stack.append(sup)
        result = self._label_cache[start] = frozenset(out)
        return result

    def roles(self, role: str, forward: bool = True) -> frozenset[tuple[str, bool]]:
        """All (S, fwd') such that R(x,y) entails S(x,y) (fwd') or S(y,x)."""
        key = (role, forward)
        hit = self._role_cache.get(key)
        if hit is not None:
            return hit
        out, stack = {key}, [key]
        while stack:
            r, fwd = stack.pop()
            for sup, same in self._role_up.get(r, ()):
                item = (sup, fwd if same else not fwd)
                if item not in out:
                    out.add(item)
                    stack.append(item)
        result = self._role_cache[key] = frozenset(out)
        return result

    def unary_sources(self, pred: str, universe: Iterable[str]) -> list[str]:
        """Unary predicates B from ``universe`` with B(x) |= pred(x)."""
        return sorted(b for b in universe if pred in self.labels({b}))

    def role_sources(self, role: str, universe: Iterable[str]) -> list[tuple[str, bool]]:
        """Signed roles (S, fwd) from ``universe`` with S entailing role(x,y)."""
        return sorted(
            (s, fwd) for s in universe for fwd in (True, False) if (role, fwd) in self.roles(s, True)
        )

    def fired_rules(self, labels: Iterable[str]) -> list[tuple[int, ExistentialRule]]:
        labels = set(labels)
        return [(i, r) for i, r in self.rules if r.premise in labels]

    def child_labels(self, rule: ExistentialRule) -> frozenset[str]:
        return self.labels(rule.y_labels)

    def type_depths(self, start_labels: Iterable[frozenset[str]]) -> dict[int, int]:
        """Smallest depth at which each existential rule creates an element."""
        depth: dict[int, int] = {}
        queue: deque[tuple[int, int]] = deque()
        for labels in start_labels:
            for i, _ in self.fired_rules(labels):
                if i not in depth:
                    depth[i] = 1
                    queue.append((i, 1))
        by_index = dict(self.rules)
        while queue:
            i, d = queue.popleft()
            for j, _ in self.fired_rules(self.child_labels(by_index[i])):
                if j not in depth:
                    depth[j] = d + 1
                    queue.append((j, d + 1))
        return depth


@dataclass(frozen=True)
class Element:
    name: str
    depth: int
    generator: str | None = None  # premise of the rule that created it
    parent: str | None = None
    rule: int | None = None

    @property
    def anonymous(self) -> bool:
        return self.generator is not None


@dataclass
class UniversalModel:
    elements: dict[str, Element]
    unary_labels: dict[str, frozenset[str]]
    binary_edges: frozenset[tuple[str, str, str]]
    depth_limit: int
    truncated: bool
    _out: dict[tuple[str, str], set[str]] = field(default_factory=dict, repr=False)
    _in: dict[tuple[str, str], set[str]] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        out, inc = defaultdict(set), defaultdict(set)
        for p, s, t in self.binary_edges:
            out[(p, s)].add(t)
            inc[(p, t)].add(s)
        self._out, self._in = dict(out), dict(inc)

    @property
    def constants(self) -> list[str]:
        return sorted(n for n, e in self.elements.items() if not e.anonymous)

    def successors(self, pred: str, src: str) -> set[str]:
        return self._out.get((pred, src), set())

    def predecessors(self, pred: str, dst: str) -> set[str]:
        return self._in.get((pred, dst), set())

    def holds(self, atom: Atom, assignment: Mapping[str, str]) -> bool:
        vals = [assignment[a] for a in atom.args]
        if atom.arity == 1:
            return atom.pred in self.unary_labels.get(vals[0], ())
        return vals[1] in self.successors(atom.pred, vals[0])

    @property
    def max_depth(self) -> int:
        return max((e.depth for e in self.elements.values()), default=0)

    def dump(self) -> str:
        lines = [
            f"elem {name} depth={el.depth} labels={','.join(sorted(self.unary_labels[name]))}"
            for name, el in self.elements.items()
        ]
        lines += [f"edge {p} {s} {t}" for p, s, t in self.binary_edges]
        return "".join(line + "\n" for line in sorted(lines))


@dataclass
class UniversalTree(UniversalModel):
    generator: str = ""
    root: str = "a"


def chase(data: DataInstance, ontology: Ontology, depth_limit: int,
          closure: Closure | None = None) -> UniversalModel:
    closure = closure or Closure(ontology)
    elements: dict[str, Element] = {}
    labels: dict[str, frozenset[str]] = {}
    edges: set[tuple[str, str, str]] = set()

    def add_edge(role: str, src: str, dst: str):
        for s, fwd in closure.roles(role):
            edges.add((s, src, dst) if fwd else (s, dst, src))

    initial: dict[str, set[str]] = defaultdict(set)
    for p, c in data.unary_facts:
        initial[c].add(p)
    for c in sorted(data.constants):
        elements[c] = Element(c, 0)
        labels[c] = closure.labels(initial[c])
    for p, s, t in data.binary_facts:
        add_edge(p, s, t)

    truncated = False
    frontier = deque(sorted(data.constants))
    while frontier:
        name = frontier.popleft()
        el = elements[name]
        for idx, rule in closure.fired_rules(labels[name]):
            if el.depth + 1 > depth_limit:
                truncated = True
                continue
            child = f"{name}.{idx}"
            elements[child] = Element(child, el.depth + 1, rule.premise, name, idx)
            labels[child] = closure.child_labels(rule)
            for role, forward in rule.edges:
                add_edge(role, name, child) if forward else add_edge(role, child, name)
            frontier.append(child)
    return UniversalModel(elements, labels, frozenset(edges), depth_limit, truncated)


def universal_tree(pred: str, ontology: Ontology, depth_limit: int,
                   closure: Closure | None = None) -> UniversalTree:
    root = "a"
    m = chase(DataInstance.from_facts([Atom(pred, (root,))]), ontology, depth_limit, closure)
    return UniversalTree(m.elements, m.unary_labels, m.binary_edges, m.depth_limit,
                         m.truncated, generator=pred, root=root)


# ---------------------------------------------------------------------------
# homomorphisms


def _order_variables(atoms: list[Atom], fixed: Iterable[str]) -> list[str]:
    """Variables ordered so that each one is adjacent to an earlier one when possible."""
    fixed = set(fixed)
    adj: dict[str, set[str]] = defaultdict(set)
    weight: dict[str, int] = defaultdict(int)
    for a in atoms:
        for v in a.args:
            weight[v] += 1
            adj[v].update(a.args)
    order: list[str] = []
    placed = set(fixed)
    remaining = [v for v in dict.fromkeys(v for a in atoms for v in a.args) if v not in fixed]
    while remaining:
        linked = [v for v in remaining if adj[v] & placed]
        pool = linked or remaining
        v = max(pool, key=lambda u: weight[u])
        order.append(v)
        placed.add(v)
        remaining.remove(v)
    return order


def homomorphisms(atoms: Iterable[Atom], model: UniversalModel,
                  fixed: Mapping[str, str] | None = None,
                  candidates: Mapping[str, Iterable[str]] | None = None) -> Iterator[dict[str, str]]:
    """Yield every atom-preserving assignment extending ``fixed``.

    ``candidates`` optionally restricts the range of individual variables.
    """
    atoms = list(atoms)
    fixed = dict(fixed or {})
    for a in atoms:
        if all(v in fixed for v in a.args) and not model.holds(a, fixed):
            return
    order = _order_variables(atoms, fixed)
    unary: dict[str, list[str]] = defaultdict(list)
    binary: dict[str, list[Atom]] = defaultdict(list)
    for a in atoms:
        if a.arity == 1:
            unary[a.args[0]].append(a.pred)
        else:
            for v in set(a.args):
                binary[v].append(a)
    restrict = {v: set(c) for v, c in (candidates or {}).items()}
    all_elements = list(model.elements)

    def options(v: str, env: dict[str, str]) -> Iterable[str]:
        pool: set[str] | None = None
        for a in binary[v]:
            s, t = a.args
            if s == v and t in env:
                got = model.predecessors(a.pred, env[t])
            elif t == v and s in env:
                got = model.successors(a.pred, env[s])
            else:
                continue
            pool = set(got) if pool is None else pool & got
            if not pool:
                return ()
        base = sorted(pool) if pool is not None else all_elements
        if v in restrict:
            base = [e for e in base if e in restrict[v]]
        need = unary[v]
        return [e for e in base if all(p in model.unary_labels[e] for p in need)]

    def consistent(v: str, env: dict[str, str]) -> bool:
        for a in binary[v]:
            if all(x in env for x in a.args) and not model.holds(a, env):
                return False
        return True

    def search(i: int, env: dict[str, str]) -> Iterator[dict[str, str]]:
        if i == len(order):
            yield dict(env)
            return
        v = order[i]
        for e in options(v, env):
            env[v] = e
            if consistent(v, env):
                yield from search(i + 1, env)
            del env[v]

    yield from search(0, fixed)


def homomorphism_exists(q: ConjunctiveQuery, model: UniversalModel,
                        fixed: Mapping[str, str] | None = None) -> bool:
    return next(homomorphisms(q.atoms, model, fixed), None) is not None


def default_depth(data: DataInstance, ontology: Ontology, q: ConjunctiveQuery,
                  closure: Closure | None = None) -> int:
    """A chase depth at which certain answers of q are exact.

    Components containing an answer variable (or mapped onto a constant)
    stay within |vars| steps of the data.  A component mapped entirely into
    anonymous elements can be moved to the shallowest copy of its top
    element's type, so it needs the deepest first-occurrence depth on top.
    """
    closure = closure or Closure(ontology)
    nvars = len(q.variables)
    bound = max(2, nvars) + 1
    if any(not c.answer_vars for c in query_components(q)):
        initial: dict[str, set[str]] = defaultdict(set)
        for p, c in data.unary_facts:
            initial[c].add(p)
        starts = [closure.labels(initial[c]) for c in data.constants]
        first = closure.type_depths(starts)
        bound = max(bound, nvars + max(first.values(), default=0))
    return bound


def answers_in_model(q: ConjunctiveQuery, model: UniversalModel) -> set[tuple[str, ...]]:
    """Tuples of constants a such that q(a) has a homomorphism into the model."""
    if not q.answer_vars:
        return {()} if homomorphism_exists(q, model) else set()
    consts = model.constants
    pools = []
    for v in q.answer_vars:
        need = [a.pred for a in q.atoms if a.args == (v,)]
        pools.append([c for c in consts if all(p in model.unary_labels[c] for p in need)])
    out = set()
    for tup in product(*pools):
        if homomorphism_exists(q, model, dict(zip(q.answer_vars, tup))):
            out.add(tup)
    return out


def certain_answers(data: DataInstance, ontology: Ontology, q: ConjunctiveQuery,
                    depth_limit: int | None = None) -> set[tuple[str, ...]]:
    closure = Closure(ontology)
    if depth_limit is None:
        depth_limit = default_depth(data, ontology, q, closure)
    return answers_in_model(q, chase(data, ontology, depth_limit, closure))


def ontology_depth(ontology: Ontology) -> float:
    """Maximal number of existential steps over all data; inf if unbounded."""
    closure = Closure(ontology)
    by_index = dict(closure.rules)
    succ = {i: [j for j, _ in closure.fired_rules(closure.child_labels(r))] for i, r in by_index.items()}
    memo: dict[int, float] = {}
    active: set[int] = set()

    def longest(i: int) -> float:
        if i in memo:
            return memo[i]
        if i in active:
            return float("inf")
        active.add(i)
        best = 1 + max((longest(j) for j in succ[i]), default=0)
        active.discard(i)
        memo[i] = best
        return best

    return max((longest(i) for i in by_index), default=0)
