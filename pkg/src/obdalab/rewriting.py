"""Tree-witness rewriting into positive existential formulas and datalog.

A tree witness is a connected set of existential query variables that can be
sent into the anonymous part of a universal tree, with all neighbouring
variables sent to its root.  Each set of witnesses with pairwise disjoint
covered atoms yields one disjunct of the PE-rewriting.
"""
from __future__ import annotations

import re
from collections import defaultdict
from dataclasses import dataclass
from graphlib import CycleError, TopologicalSorter
from typing import Iterable, Iterator, Union

from .chase import Closure, UniversalTree, homomorphisms, universal_tree
from .logic import (
    IDENT,
    Atom,
    ConjunctiveQuery,
    DataInstance,
    Ontology,
    ParseError,
    Signature,
    ValidationError,
    parse_atom_list,
    query_components,
)

# ---------------------------------------------------------------------------
# positive existential formulas


@dataclass(frozen=True)
class And:
    children: tuple["Formula", ...]


@dataclass(frozen=True)
class Or:
    children: tuple["Formula", ...]


@dataclass(frozen=True)
class Exists:
    vars: tuple[str, ...]
    child: "Formula"


Formula = Union[Atom, And, Or, Exists]


def conj(parts: Iterable[Formula]) -> Formula:
    parts = tuple(dict.fromkeys(parts))
    return parts[0] if len(parts) == 1 else And(parts)


def disj(parts: Iterable[Formula]) -> Formula:
    parts = tuple(dict.fromkeys(parts))
    return parts[0] if len(parts) == 1 else Or(parts)


def exists(vars_: Iterable[str], child: Formula) -> Formula:
    vars_ = tuple(vars_)
    return Exists(vars_, child) if vars_ else child


def variables_in_order(f: Formula) -> list[str]:
    """Free variables of f, in order of first occurrence."""
    if isinstance(f, Atom):
        return list(dict.fromkeys(f.args))
    if isinstance(f, Exists):
        bound = set(f.vars)
        return [v for v in variables_in_order(f.child) if v not in bound]
    seen: dict[str, None] = {}
    for c in f.children:
        seen.update(dict.fromkeys(variables_in_order(c)))
    return list(seen)


def free_vars(f: Formula) -> frozenset[str]:
    return frozenset(variables_in_order(f))


def _check_safe(f: Formula) -> None:
    if isinstance(f, Atom):
        return
    if isinstance(f, Exists):
        _check_safe(f.child)
        return
    for c in f.children:
        _check_safe(c)
    if isinstance(f, Or) and f.children:
        first = free_vars(f.children[0])
        if any(free_vars(c) != first for c in f.children[1:]):
            raise ValidationError("disjuncts of an Or must share their free variables")


@dataclass(frozen=True)
class PEFormula:
    answer_vars: tuple[str, ...]
    body: Formula
    name: str = "q"

    def __post_init__(self):
        object.__setattr__(self, "answer_vars", tuple(self.answer_vars))
        _check_safe(self.body)
        fv = free_vars(self.body)
        if fv != set(self.answer_vars):
            raise ValidationError(
                f"free variables {sorted(fv)} differ from answer variables {list(self.answer_vars)}"
            )

    @property
    def disjuncts(self) -> tuple[Formula, ...]:
        return self.body.children if isinstance(self.body, Or) else (self.body,)

    def __str__(self) -> str:
        return format_pe(self)


def formula_size(f: Formula) -> int:
    if isinstance(f, Atom):
        return 1 + f.arity
    if isinstance(f, Exists):
        return len(f.vars) + formula_size(f.child)
    if not f.children:
        return 1  # the constant true / false
    return sum(formula_size(c) for c in f.children) + len(f.children) - 1


def format_formula(f: Formula) -> str:
    if isinstance(f, Atom):
        return str(f)
    if isinstance(f, Exists):
        return f"(exists {','.join(f.vars)}: {format_formula(f.child)})"
    if not f.children:
        return "true" if isinstance(f, And) else "false"
    if len(f.children) == 1:
        return format_formula(f.children[0])
    sep = " & " if isinstance(f, And) else " | "
    return "(" + sep.join(format_formula(c) for c in f.children) + ")"


def format_pe(pe: PEFormula) -> str:
    return f"{pe.name}({','.join(pe.answer_vars)}) :- {format_formula(pe.body)}"


_TOKEN_RE = re.compile(rf"\s*(:-|{IDENT}|[A-Za-z0-9_]+|[()&|,:=])")


def _tokenize(text: str) -> list[str]:
    out, pos = [], 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character at {text[pos:]!r}")
        out.append(m.group(1))
        pos = m.end()
    return out


class _FormulaParser:
    def __init__(self, tokens: list[str]):
        self.toks = tokens
        self.i = 0

    def peek(self) -> str | None:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self, expected: str | None = None) -> str:
        tok = self.peek()
        if tok is None or (expected is not None and tok != expected):
            raise ParseError(f"expected {expected or 'a token'}, got {tok!r}")
        self.i += 1
        return tok

    def formula(self) -> Formula:
        """A chain of primaries joined by one connective; mixing needs parentheses."""
        parts = [self.primary()]
        op = None
        while self.peek() in ("&", "|"):
            if op is None:
                op = self.peek()
            elif self.peek() != op:
                raise ParseError("mixed & and | without parentheses")
            self.take()
            parts.append(self.primary())
        if op is None:
            return parts[0]
        return And(tuple(parts)) if op == "&" else Or(tuple(parts))

    def primary(self) -> Formula:
        tok = self.peek()
        if tok == "(":
            self.take("(")
            vars_ = []
            if self.peek() == "exists":
                self.take()
                vars_ = [self.take()]
                while self.peek() == ",":
                    self.take(",")
                    vars_.append(self.take())
                self.take(":")
            child = self.formula()
            self.take(")")
            return Exists(tuple(vars_), child) if vars_ else child
        if tok == "true":
            self.take()
            return And(())
        if tok == "false":
            self.take()
            return Or(())
        name = self.take()
        if self.peek() == "=":
            self.take("=")
            return Atom("=", (name, self.take()))
        self.take("(")
        args = []
        while self.peek() != ")":
            args.append(self.take())
            if self.peek() == ",":
                self.take(",")
        self.take(")")
        return Atom(name, tuple(args))


def parse_pe(text: str) -> PEFormula:
    lines = [l.split("#", 1)[0].strip() for l in text.splitlines()]
    line = " ".join(l for l in lines if l)
    m = re.match(rf"^({IDENT})\s*\(([^()]*)\)\s*:-(.*)$", line)
    if not m:
        raise ParseError("expected 'q(x,...) :- formula'")
    head = tuple(s.strip() for s in m.group(2).split(",") if s.strip())
    parser = _FormulaParser(_tokenize(m.group(3)))
    body = parser.formula()
    if parser.peek() is not None:
        raise ParseError(f"trailing input at {parser.peek()!r}")
    return PEFormula(head, body, m.group(1))


# ---------------------------------------------------------------------------
# evaluation of PE formulas over plain data


class _Facts:
    def __init__(self, data: DataInstance):
        self.domain = sorted(data.constants)
        self.unary: dict[str, set[str]] = defaultdict(set)
        self.fwd: dict[str, dict[str, set[str]]] = defaultdict(lambda: defaultdict(set))
        self.bwd: dict[str, dict[str, set[str]]] = defaultdict(lambda: defaultdict(set))
        self.pairs: dict[str, set[tuple[str, str]]] = defaultdict(set)
        for p, c in data.unary_facts:
            self.unary[p].add(c)
        for p, s, t in data.binary_facts:
            self.fwd[p][s].add(t)
            self.bwd[p][t].add(s)
            self.pairs[p].add((s, t))

    def match(self, atom: Atom, env: dict[str, str]) -> Iterator[dict[str, str]]:
        args = atom.args
        if atom.pred == "=":
            a, b = args
            if a in env and b in env:
                if env[a] == env[b]:
                    yield env
            elif a in env:
                yield {**env, b: env[a]}
            elif b in env:
                yield {**env, a: env[b]}
            else:
                for c in self.domain:
                    yield {**env, a: c, b: c}
            return
        if len(args) == 1:
            (v,) = args
            if v in env:
                if env[v] in self.unary.get(atom.pred, ()):
                    yield env
            else:
                for c in sorted(self.unary.get(atom.pred, ())):
                    yield {**env, v: c}
            return
        s, t = args
        if s in env and t in env:
            if env[t] in self.fwd[atom.pred].get(env[s], ()):
                yield env
        elif s in env:
            for d in sorted(self.fwd[atom.pred].get(env[s], ())):
                yield {**env, t: d}
        elif t in env:
            for d in sorted(self.bwd[atom.pred].get(env[t], ())):
                yield {**env, s: d}
        else:
            for a, b in sorted(self.pairs.get(atom.pred, ())):
                if s == t and a != b:
                    continue
                yield {**env, s: a, t: b}


def _conj_order(children: Iterable[Formula]) -> list[Formula]:
    def rank(f: Formula) -> int:
        if isinstance(f, Atom):
            return 2 if f.pred == "=" else 0
        return 1
    return sorted(children, key=rank)


def _solutions(f: Formula, env: dict[str, str], facts: _Facts) -> Iterator[dict[str, str]]:
    if isinstance(f, Atom):
        yield from facts.match(f, env)
    elif isinstance(f, And):
        def chain(parts: list[Formula], e: dict[str, str]) -> Iterator[dict[str, str]]:
            if not parts:
                yield e
                return
            for e2 in _solutions(parts[0], e, facts):
                yield from chain(parts[1:], e2)
        yield from chain(_conj_order(f.children), env)
    elif isinstance(f, Or):
        for c in f.children:
            yield from _solutions(c, env, facts)
    else:
        bound = set(f.vars)
        inner_env = {k: v for k, v in env.items() if k not in bound}
        keep = [v for v in variables_in_order(f) if v not in env]
        seen = set()
        for sol in _solutions(f.child, inner_env, facts):
            key = tuple(sol[v] for v in keep)
            if key in seen:
                continue
            seen.add(key)
            yield {**env, **dict(zip(keep, key))}


def eval_pe(f: PEFormula, data: DataInstance) -> set[tuple[str, ...]]:
    facts = _Facts(data)
    return {tuple(s[v] for v in f.answer_vars) for s in _solutions(f.body, {}, facts)}


# ---------------------------------------------------------------------------
# nonrecursive datalog


@dataclass(frozen=True)
class Rule:
    head: Atom
    body: tuple[Atom, ...]

    def __post_init__(self):
        object.__setattr__(self, "body", tuple(self.body))
        body_vars = {v for a in self.body for v in a.args}
        missing = [v for v in self.head.args if v not in body_vars]
        if missing:
            raise ValidationError(f"head variable(s) {missing} of {self.head} missing from the body")

    def __str__(self) -> str:
        body = ", ".join(map(str, self.body)) if self.body else "true"
        return f"{self.head} :- {body}."


@dataclass(frozen=True)
class NDLProgram:
    rules: tuple[Rule, ...]
    goal: str = "G"
    goal_arity: int = 0

    def __post_init__(self):
        object.__setattr__(self, "rules", tuple(self.rules))
        for r in self.rules:
            if r.head.pred == self.goal and r.head.arity != self.goal_arity:
                raise ValidationError(f"goal {self.goal} has arity {self.goal_arity}, rule head is {r.head}")

    @property
    def idb(self) -> set[str]:
        return {r.head.pred for r in self.rules}

    def dependency_order(self) -> list[str]:
        """IDB predicates in evaluation order; raises ValidationError on a cycle."""
        idb = self.idb
        graph: dict[str, set[str]] = {p: set() for p in idb}
        for r in self.rules:
            graph[r.head.pred].update(a.pred for a in r.body if a.pred in idb)
        try:
            return list(TopologicalSorter(graph).static_order())
        except CycleError as exc:
            raise ValidationError(f"cyclic program: {exc.args[1]}") from None

    def __str__(self) -> str:
        return format_ndl(self)


def format_ndl(p: NDLProgram) -> str:
    lines = [str(r) for r in p.rules] + [f"goal {p.goal}/{p.goal_arity}"]
    return "".join(l + "\n" for l in lines)


def _parse_body(text: str, line: int) -> list[Atom]:
    text = text.strip()
    if text == "true":
        return []
    out = []
    for piece in re.findall(r"[^,()]+\([^()]*\)|[^,]+", text):
        piece = piece.strip()
        eq = re.match(rf"^({IDENT}|[A-Za-z0-9_]+)\s*=\s*({IDENT}|[A-Za-z0-9_]+)$", piece)
        if eq:
            out.append(Atom("=", (eq.group(1), eq.group(2))))
        else:
            out.extend(parse_atom_list(piece, line))
    return out


def parse_ndl(text: str) -> NDLProgram:
    rules, goal = [], None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = re.match(rf"^goal\s+({IDENT})\s*/\s*(\d+)$", line)
        if m:
            goal = (m.group(1), int(m.group(2)))
            continue
        if ":-" not in line or not line.endswith("."):
            raise ParseError("expected 'Head(args) :- body.'", lineno)
        head_text, body_text = line[:-1].split(":-", 1)
        head = parse_atom_list(head_text, lineno)
        if len(head) != 1:
            raise ParseError("rule head must be one atom", lineno)
        try:
            rules.append(Rule(head[0], tuple(_parse_body(body_text, lineno))))
        except ValidationError as exc:
            raise ParseError(str(exc), lineno) from None
    if goal is None:
        raise ParseError("missing 'goal G/k' line")
    return NDLProgram(tuple(rules), goal[0], goal[1])


def _join(body: list[Atom], rel: dict[str, set[tuple[str, ...]]], domain: list[str],
          env: dict[str, str]) -> Iterator[dict[str, str]]:
    if not body:
        yield env
        return
    # most-bound relational atom first, equalities once a side is bound
    def rank(a: Atom) -> tuple[int, int]:
        unbound = sum(v not in env for v in a.args)
        if a.pred == "=":
            return (0 if unbound < 2 else 2, unbound)
        return (1, unbound)
    atom = min(body, key=rank)
    rest = list(body)
    rest.remove(atom)
    if atom.pred == "=":
        a, b = atom.args
        if a in env and b in env:
            if env[a] == env[b]:
                yield from _join(rest, rel, domain, env)
        elif a in env or b in env:
            val = env.get(a, env.get(b))
            yield from _join(rest, rel, domain, {**env, a: val, b: val})
        else:
            for c in domain:
                yield from _join(rest, rel, domain, {**env, a: c, b: c})
        return
    for tup in rel.get(atom.pred, ()):
        new = dict(env)
        ok = True
        for v, c in zip(atom.args, tup):
            if new.setdefault(v, c) != c:
                ok = False
                break
        if ok:
            yield from _join(rest, rel, domain, new)


def eval_ndl(p: NDLProgram, data: DataInstance) -> set[tuple[str, ...]]:
    order = p.dependency_order()
    rel: dict[str, set[tuple[str, ...]]] = defaultdict(set)
    for pred, c in data.unary_facts:
        rel[pred].add((c,))
    for pred, s, t in data.binary_facts:
        rel[pred].add((s, t))
    by_head: dict[str, list[Rule]] = defaultdict(list)
    for r in p.rules:
        by_head[r.head.pred].append(r)
    domain = sorted(data.constants)
    for pred in order:
        derived: set[tuple[str, ...]] = set()
        for r in by_head[pred]:
            for env in _join(list(r.body), rel, domain, {}):
                derived.add(tuple(env[v] for v in r.head.args))
        rel[pred] = derived  # IDB names shadow any data facts
    if p.goal not in by_head:
        return set()
    return set(rel[p.goal])


def ndl_size(p: NDLProgram) -> int:
    return sum(1 + r.head.arity + sum(1 + a.arity for a in r.body) for r in p.rules) + 1


def size_of(x: PEFormula | NDLProgram | Formula) -> int:
    if isinstance(x, NDLProgram):
        return ndl_size(x)
    if isinstance(x, PEFormula):
        return formula_size(x.body)
    return formula_size(x)


def _predicates(f: Formula) -> set[str]:
    if isinstance(f, Atom):
        return {f.pred}
    if isinstance(f, Exists):
        return _predicates(f.child)
    return set().union(*(_predicates(c) for c in f.children)) if f.children else set()


class _Namer:
    def __init__(self, reserved: Iterable[str], prefix: str):
        self.reserved = set(reserved)
        self.prefix = prefix
        self.k = 0

    def __call__(self) -> str:
        while True:
            self.k += 1
            name = f"{self.prefix}{self.k}"
            if name not in self.reserved:
                self.reserved.add(name)
                return name

    def fixed(self, name: str) -> str:
        while name in self.reserved:
            name += "_"
        self.reserved.add(name)
        return name


def pe_to_ndl(f: PEFormula, goal: str = "G", prefix: str = "N",
              reserved: Iterable[str] = ()) -> NDLProgram:
    """One fresh predicate per connective, one rule per Or-child, then F -> G."""
    namer = _Namer(set(reserved) | _predicates(f.body), prefix)
    goal = namer.fixed(goal)
    rules: list[Rule] = []

    def build(node: Formula) -> Atom:
        if isinstance(node, Atom):
            return node
        head = Atom(namer(), tuple(variables_in_order(node)))
        if isinstance(node, And):
            rules.append(Rule(head, tuple(build(c) for c in node.children)))
        elif isinstance(node, Or):
            for c in node.children:
                rules.append(Rule(head, (build(c),)))
        else:
            rules.append(Rule(head, (build(node.child),)))
        return head

    top = build(f.body)
    if isinstance(f.body, Atom):
        wrapped = Atom(namer(), tuple(variables_in_order(f.body)))
        rules.append(Rule(wrapped, (top,)))
        top = wrapped
    rules.append(Rule(Atom(goal, f.answer_vars), (top,)))
    return NDLProgram(tuple(rules), goal, len(f.answer_vars))


# ---------------------------------------------------------------------------
# tree witnesses


@dataclass(frozen=True)
class TreeWitness:
    inner_vars: frozenset[str]
    boundary_vars: frozenset[str]
    covered_atoms: frozenset[Atom]
    generators: frozenset[str]

    def __post_init__(self):
        if not self.inner_vars or not self.generators:
            raise ValidationError("tree witness needs inner variables and a generator")
        if self.inner_vars & self.boundary_vars:
            raise ValidationError("inner and boundary variables overlap")

    @property
    def key(self) -> tuple[str, ...]:
        return tuple(sorted(self.inner_vars))


class _Context:
    """Shared per-(query, ontology) state: closure, data universe, tree cache."""

    def __init__(self, q: ConjunctiveQuery, ontology: Ontology, closure: Closure | None = None):
        self.q = q
        self.ontology = ontology
        self.closure = closure or Closure(ontology)
        sig = ontology.signature.union(Signature.from_atoms(q.atoms))
        allowed = ontology.allows_in_data
        self.data_unary = sorted(p for p in sig.unary_predicates if allowed(p))
        self.data_binary = sorted(p for p in sig.binary_predicates if allowed(p))
        self._trees: dict[str, UniversalTree] = {}

    def saturate(self, atom: Atom) -> list[Atom]:
        """Data atoms over the same arguments that entail ``atom``."""
        if atom.arity == 1:
            return [Atom(b, atom.args) for b in self.closure.unary_sources(atom.pred, self.data_unary)]
        s, t = atom.args
        return [Atom(r, (s, t) if fwd else (t, s))
                for r, fwd in self.closure.role_sources(atom.pred, self.data_binary)]

    def tree(self, pred: str, depth: int) -> UniversalTree:
        hit = self._trees.get(pred)
        if hit is None or hit.depth_limit < depth:
            hit = self._trees[pred] = universal_tree(pred, self.ontology, depth, self.closure)
        return hit


def _connected_subsets(vertices: list[str], adj: dict[str, set[str]], limit: int) -> list[frozenset[str]]:
    seen: set[frozenset[str]] = set()
    frontier = [frozenset({v}) for v in vertices]
    seen.update(frontier)
    allowed = set(vertices)
    while frontier:
        nxt = []
        for s in frontier:
            if len(s) >= limit:
                continue
            for u in set().union(*(adj[v] for v in s)) & allowed:
                if u not in s:
                    t = s | {u}
                    if t not in seen:
                        seen.add(t)
                        nxt.append(t)
        frontier = nxt
    return sorted(seen, key=lambda s: (len(s), sorted(s)))


def tree_witnesses(q: ConjunctiveQuery, ontology: Ontology, tree_depth_limit: int | None = None,
                   max_inner: int | None = None, _ctx: _Context | None = None) -> list[TreeWitness]:
    ctx = _ctx or _Context(q, ontology)
    closure = ctx.closure
    exist = [v for v in q.variables if v in q.existential_vars]
    max_inner = len(exist) if max_inner is None else max_inner
    adj: dict[str, set[str]] = {v: set() for v in q.variables}
    for a in q.atoms:
        for v in a.args:
            adj[v].update(u for u in a.args if u != v)

    # a generator must fire a rule and be derivable from some data predicate
    candidates = []
    for pred in sorted(ctx.ontology.signature.unary_predicates):
        if not closure.fired_rules(closure.labels({pred})):
            continue
        if not closure.unary_sources(pred, ctx.data_unary):
            continue
        first = closure.type_depths([closure.labels({pred})])
        depth = tree_depth_limit if tree_depth_limit is not None else (
            len(exist) + max(first.values(), default=0))
        candidates.append((pred, depth))

    out = []
    for inner in _connected_subsets(exist, adj, max_inner):
        boundary = frozenset(set().union(*(adj[v] for v in inner)) - inner)
        covered = frozenset(a for a in q.atoms if inner & set(a.args))
        gens = []
        for pred, depth in candidates:
            tree = ctx.tree(pred, depth)
            non_root = [e for e in tree.elements if e != tree.root]
            fixed = {b: tree.root for b in boundary}
            cands = {v: non_root for v in inner}
            if next(homomorphisms(covered, tree, fixed, cands), None) is not None:
                gens.append(pred)
        if gens:
            out.append(TreeWitness(frozenset(inner), boundary, covered, frozenset(gens)))
    return out


def independent_sets(witnesses: list[TreeWitness]) -> list[tuple[int, ...]]:
    """All index sets of witnesses with pairwise disjoint covered atoms, canonical order."""
    n = len(witnesses)
    clash = [{j for j in range(n) if j != i and witnesses[i].covered_atoms & witnesses[j].covered_atoms}
             for i in range(n)]
    out: list[tuple[int, ...]] = []

    def grow(start: int, chosen: list[int], blocked: set[int]):
        out.append(tuple(chosen))
        for i in range(start, n):
            if i not in blocked:
                chosen.append(i)
                grow(i + 1, chosen, blocked | clash[i])
                chosen.pop()

    grow(0, [], set())
    return sorted(out, key=lambda s: (len(s), s))


def _fresh_var(taken: set[str], stem: str = "w") -> str:
    k = 0
    while True:
        k += 1
        name = f"{stem}{k}"
        if name not in taken:
            taken.add(name)
            return name


def _disjunct(q: ConjunctiveQuery, chosen: list[TreeWitness], ctx: _Context) -> Formula | None:
    parent = {v: v for v in q.variables}

    def find(v: str) -> str:
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for tw in chosen:
        bs = sorted(tw.boundary_vars)
        for b in bs[1:]:
            parent[find(b)] = find(bs[0])
    classes: dict[str, list[str]] = defaultdict(list)
    for v in q.variables:
        classes[find(v)].append(v)
    rep: dict[str, str] = {}
    equalities = []
    for members in classes.values():
        answers = [v for v in q.answer_vars if v in members]
        r = answers[0] if answers else min(members)
        for v in members:
            rep[v] = r
        equalities += [Atom("=", (r, a)) for a in answers[1:]]

    inner = set().union(*(tw.inner_vars for tw in chosen)) if chosen else set()
    covered = set().union(*(tw.covered_atoms for tw in chosen)) if chosen else set()
    parts: list[Formula] = []
    for atom in q.atoms:
        if atom in covered:
            continue
        sources = ctx.saturate(atom.rename(rep))
        if not sources:
            return None
        parts.append(disj(sources))
    taken = set(q.variables)
    for tw in chosen:
        gens = sorted({b for g in tw.generators for b in ctx.closure.unary_sources(g, ctx.data_unary)})
        if tw.boundary_vars:
            r = rep[next(iter(tw.boundary_vars))]
            parts.append(disj(Atom(g, (r,)) for g in gens))
        else:
            w = _fresh_var(taken)
            parts.append(Exists((w,), disj(Atom(g, (w,)) for g in gens)))
    parts += equalities
    survivors = dict.fromkeys(
        rep[v] for v in q.variables
        if v in q.existential_vars and v not in inner and rep[v] not in q.answer_vars
    )
    return exists(survivors, conj(parts))


def pe_rewriting(q: ConjunctiveQuery, ontology: Ontology, max_inner: int | None = None) -> PEFormula:
    ctx = _Context(q, ontology)
    witnesses = sorted(tree_witnesses(q, ontology, max_inner=max_inner, _ctx=ctx), key=lambda t: t.key)
    disjuncts = []
    for idx in independent_sets(witnesses):
        d = _disjunct(q, [witnesses[i] for i in idx], ctx)
        if d is not None:
            disjuncts.append(d)
    body = Or(tuple(disjuncts)) if len(disjuncts) != 1 else disjuncts[0]
    return PEFormula(q.answer_vars, body, q.name)


def ndl_rewriting(q: ConjunctiveQuery, ontology: Ontology, goal: str = "G") -> NDLProgram:
    """Datalog rewriting built per connected component of q and joined by the goal rule.

    Components share no variables, so their certain answers combine by
    product; this keeps the program linear in the number of components.
    """
    comps = query_components(q)
    if len(comps) <= 1:
        return pe_to_ndl(pe_rewriting(q, ontology), goal=goal)
    reserved = set(ontology.signature.unary_predicates | ontology.signature.binary_predicates)
    reserved |= {a.pred for a in q.atoms}
    reserved.add(goal)
    rules: list[Rule] = []
    body: list[Atom] = []
    for i, comp in enumerate(comps, 1):
        sub = pe_to_ndl(pe_rewriting(comp, ontology), goal=f"{goal}{i}", prefix=f"N{i}_",
                        reserved=reserved)
        reserved |= {r.head.pred for r in sub.rules}
        rules.extend(sub.rules)
        body.append(Atom(sub.goal, comp.answer_vars))
    rules.append(Rule(Atom(goal, q.answer_vars), tuple(body)))
    return NDLProgram(tuple(rules), goal, len(q.answer_vars))


def count_disjuncts(q: ConjunctiveQuery, ontology: Ontology) -> int:
    """Number of disjuncts of the PE-rewriting, via per-component counts."""
    total = 1
    for comp in query_components(q):
        total *= len(pe_rewriting(comp, ontology).disjuncts)
    return total
