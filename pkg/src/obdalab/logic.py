"""Signatures, data instances, ontologies and conjunctive queries.

Also holds the text grammar for ontology, data and query files and the
query-graph classification (linear / tree-like / general).
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Union

IDENT = r"[A-Za-z_][A-Za-z0-9_]*"
_IDENT_RE = re.compile(rf"^{IDENT}$")
_ATOM_RE = re.compile(rf"\s*({IDENT})\s*\(([^()]*)\)\s*")
_CONST_RE = re.compile(r"^(?:[A-Za-z0-9_]+|'[^']*'|\"[^\"]*\")$")


class ParseError(ValueError):
    """Raised for malformed input text; carries the 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ValidationError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class Atom:
    pred: str
    args: tuple[str, ...]

    @property
    def arity(self) -> int:
        return len(self.args)

    def rename(self, mapping: dict[str, str]) -> "Atom":
        return Atom(self.pred, tuple(mapping.get(a, a) for a in self.args))

    def __str__(self) -> str:
        if self.pred == "=":
            return f"{self.args[0]} = {self.args[1]}"
        return f"{self.pred}({','.join(self.args)})"


@dataclass(frozen=True)
class Signature:
    unary_predicates: frozenset[str] = frozenset()
    binary_predicates: frozenset[str] = frozenset()

    def __post_init__(self):
        clash = self.unary_predicates & self.binary_predicates
        if clash:
            raise ValidationError(f"predicates used with two arities: {sorted(clash)}")
        for name in self.unary_predicates | self.binary_predicates:
            if not _IDENT_RE.match(name):
                raise ValidationError(f"bad predicate name {name!r}")

    @classmethod
    def from_atoms(cls, atoms: Iterable[Atom]) -> "Signature":
        unary, binary = set(), set()
        for atom in atoms:
            if atom.arity == 1:
                unary.add(atom.pred)
            elif atom.arity == 2:
                binary.add(atom.pred)
            else:
                raise ValidationError(f"{atom.pred}: only unary and binary predicates are supported")
        return cls(frozenset(unary), frozenset(binary))

    def union(self, other: "Signature") -> "Signature":
        return Signature(
            self.unary_predicates | other.unary_predicates,
            self.binary_predicates | other.binary_predicates,
        )

    def arity(self, pred: str) -> int | None:
        if pred in self.unary_predicates:
            return 1
        if pred in self.binary_predicates:
            return 2
        return None


@dataclass(frozen=True)
class DataInstance:
    constants: frozenset[str] = frozenset()
    unary_facts: frozenset[tuple[str, str]] = frozenset()
    binary_facts: frozenset[tuple[str, str, str]] = frozenset()

    def __post_init__(self):
        for pred, c in self.unary_facts:
            if c not in self.constants:
                raise ValidationError(f"fact {pred}({c}) mentions an unknown constant")
        for pred, c, d in self.binary_facts:
            if c not in self.constants or d not in self.constants:
                raise ValidationError(f"fact {pred}({c},{d}) mentions an unknown constant")
        self.signature  # arity check

    @classmethod
    def from_facts(cls, facts: Iterable[Atom], constants: Iterable[str] = ()) -> "DataInstance":
        consts = set(constants)
        unary, binary = set(), set()
        for atom in facts:
            consts.update(atom.args)
            if atom.arity == 1:
                unary.add((atom.pred, atom.args[0]))
            elif atom.arity == 2:
                binary.add((atom.pred, *atom.args))
            else:
                raise ValidationError(f"{atom}: only unary and binary facts are supported")
        return cls(frozenset(consts), frozenset(unary), frozenset(binary))

    @property
    def facts(self) -> list[Atom]:
        out = [Atom(p, (c,)) for p, c in self.unary_facts]
        out += [Atom(p, (c, d)) for p, c, d in self.binary_facts]
        return sorted(out)

    @property
    def signature(self) -> Signature:
        return Signature.from_atoms(self.facts)

    def with_facts(self, facts: Iterable[Atom]) -> "DataInstance":
        return DataInstance.from_facts([*self.facts, *facts], self.constants)


@dataclass(frozen=True)
class ConceptInclusion:
    """A(x) -> B(x)"""

    sub: str
    sup: str


@dataclass(frozen=True)
class RoleInclusion:
    """R(x,y) -> S(x,y), or R(x,y) -> S(y,x) when ``inverted``."""

    sub: str
    sup: str
    inverted: bool = False


@dataclass(frozen=True)
class ExistentialRule:
    """premise(x) -> exists y: conclusion, with conclusion atoms over {x, y}."""

    premise: str
    conclusion: tuple[Atom, ...]

    def __post_init__(self):
        if not self.conclusion:
            raise ValidationError("existential rule needs at least one conclusion atom")
        for atom in self.conclusion:
            if atom.arity == 1 and atom.args[0] in ("x", "y"):
                continue
            if atom.arity == 2 and atom.args in (("x", "y"), ("y", "x")):
                continue
            raise ValidationError(f"conclusion atom {atom} must be over x and y")

    @property
    def x_labels(self) -> tuple[str, ...]:
        return tuple(a.pred for a in self.conclusion if a.args == ("x",))

    @property
    def y_labels(self) -> tuple[str, ...]:
        return tuple(a.pred for a in self.conclusion if a.args == ("y",))

    @property
    def edges(self) -> tuple[tuple[str, bool], ...]:
        """(role, forward) pairs; forward means parent -> child."""
        return tuple((a.pred, a.args == ("x", "y")) for a in self.conclusion if a.arity == 2)


Axiom = Union[ConceptInclusion, RoleInclusion, ExistentialRule]


def axiom_atoms(axiom: Axiom) -> list[Atom]:
    if isinstance(axiom, ConceptInclusion):
        return [Atom(axiom.sub, ("x",)), Atom(axiom.sup, ("x",))]
    if isinstance(axiom, RoleInclusion):
        return [Atom(axiom.sub, ("x", "y")), Atom(axiom.sup, ("x", "y"))]
    return [Atom(axiom.premise, ("x",)), *axiom.conclusion]


@dataclass(frozen=True)
class Ontology:
    axioms: tuple[Axiom, ...] = ()
    # Predicates allowed to occur in data; None means every predicate.
    data_signature: frozenset[str] | None = None

    def __post_init__(self):
        object.__setattr__(self, "axioms", tuple(self.axioms))
        if self.data_signature is not None:
            object.__setattr__(self, "data_signature", frozenset(self.data_signature))
        self.signature

    @property
    def signature(self) -> Signature:
        return Signature.from_atoms(a for ax in self.axioms for a in axiom_atoms(ax))

    @property
    def existential_rules(self) -> list[tuple[int, ExistentialRule]]:
        return [(i, ax) for i, ax in enumerate(self.axioms) if isinstance(ax, ExistentialRule)]

    def allows_in_data(self, pred: str) -> bool:
        return self.data_signature is None or pred in self.data_signature


@dataclass(frozen=True)
class ConjunctiveQuery:
    answer_vars: tuple[str, ...]
    atoms: tuple[Atom, ...]
    name: str = "q"
    existential_vars: frozenset[str] = field(init=False)

    def __post_init__(self):
        atoms = tuple(dict.fromkeys(self.atoms))
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "answer_vars", tuple(self.answer_vars))
        if len(set(self.answer_vars)) != len(self.answer_vars):
            raise ValidationError("repeated answer variable")
        used = {v for a in atoms for v in a.args}
        missing = [v for v in self.answer_vars if v not in used]
        if missing:
            raise ValidationError(f"answer variable(s) {missing} do not occur in the body")
        for a in atoms:
            if a.arity not in (1, 2):
                raise ValidationError(f"{a}: only unary and binary atoms are supported")
        Signature.from_atoms(atoms)
        object.__setattr__(self, "existential_vars", frozenset(used - set(self.answer_vars)))

    @property
    def variables(self) -> list[str]:
        """All variables, answer variables first, then in order of appearance."""
        seen = dict.fromkeys(self.answer_vars)
        for a in self.atoms:
            seen.update(dict.fromkeys(a.args))
        return list(seen)

    @property
    def is_boolean(self) -> bool:
        return not self.answer_vars

    def __str__(self) -> str:
        return format_query(self)


# ---------------------------------------------------------------------------
# query graph


@dataclass(frozen=True)
class QueryGraph:
    vertices: frozenset[str]
    edges: frozenset[frozenset[str]]
    classification: str

    def neighbours(self, v: str) -> set[str]:
        return {u for e in self.edges if v in e for u in e if u != v}

    @property
    def is_tree_like(self) -> bool:
        return self.classification in ("linear", "tree-like")

    @property
    def is_linear(self) -> bool:
        return self.classification == "linear"


def _components(vertices: Iterable[str], adj: dict[str, set[str]]) -> list[set[str]]:
    seen: set[str] = set()
    comps = []
    for v in vertices:
        if v in seen:
            continue
        comp, stack = set(), [v]
        while stack:
            u = stack.pop()
            if u in comp:
                continue
            comp.add(u)
            stack.extend(adj[u] - comp)
        seen |= comp
        comps.append(comp)
    return comps


def query_graph(q: ConjunctiveQuery) -> QueryGraph:
    vertices = frozenset(q.variables)
    edges = frozenset(
        frozenset(a.args) for a in q.atoms if a.arity == 2 and a.args[0] != a.args[1]
    )
    adj: dict[str, set[str]] = {v: set() for v in vertices}
    for e in edges:
        u, v = tuple(e)
        adj[u].add(v)
        adj[v].add(u)
    connected = len(_components(vertices, adj)) <= 1
    is_tree = connected and len(edges) == max(len(vertices) - 1, 0)
    if is_tree and all(len(n) <= 2 for n in adj.values()):
        kind = "linear"
    elif is_tree:
        kind = "tree-like"
    else:
        kind = "general"
    return QueryGraph(vertices, edges, kind)


def query_components(q: ConjunctiveQuery) -> list[ConjunctiveQuery]:
    """Split q into variable-disjoint subqueries, one per connected component."""
    adj: dict[str, set[str]] = {v: set() for v in q.variables}
    for a in q.atoms:
        for u in a.args:
            adj[u].update(w for w in a.args if w != u)
    comps = _components(q.variables, adj)
    out = []
    for comp in comps:
        atoms = tuple(a for a in q.atoms if a.args[0] in comp)
        answer = tuple(v for v in q.answer_vars if v in comp)
        out.append(ConjunctiveQuery(answer, atoms, q.name))
    return out


# ---------------------------------------------------------------------------
# text formats


def _strip_comment(line: str) -> str:
    return line.split("#", 1)[0].strip()


def parse_atom_list(text: str, line: int | None = None) -> list[Atom]:
    """Parse ``P(a,b), Q(c)`` into atoms; ``true`` denotes the empty list."""
    text = text.strip()
    if text in ("", "true"):
        return []
    atoms, pos = [], 0
    while True:
        m = _ATOM_RE.match(text, pos)
        if not m:
            raise ParseError(f"expected an atom at {text[pos:]!r}", line)
        args = [s.strip() for s in m.group(2).split(",")] if m.group(2).strip() else []
        if any(not a for a in args):
            raise ParseError(f"empty argument in {m.group(0).strip()!r}", line)
        atoms.append(Atom(m.group(1), tuple(args)))
        pos = m.end()
        if pos == len(text):
            return atoms
        if text[pos] != ",":
            raise ParseError(f"expected ',' at {text[pos:]!r}", line)
        pos += 1


def _check_arities(atoms: Iterable[tuple[Atom, int]], known: dict[str, int] | None = None) -> dict[str, int]:
    arity = dict(known or {})
    for atom, line in atoms:
        if atom.arity not in (1, 2):
            raise ParseError(f"{atom.pred}: only unary and binary predicates are supported", line)
        prev = arity.setdefault(atom.pred, atom.arity)
        if prev != atom.arity:
            raise ParseError(f"arity conflict for {atom.pred}: used with {prev} and {atom.arity} arguments", line)
    return arity


def _parse_axiom(text: str, line: int) -> Axiom:
    if "->" not in text:
        raise ParseError("expected '->'", line)
    lhs, rhs = (s.strip() for s in text.split("->", 1))
    premise = parse_atom_list(lhs, line)
    if len(premise) != 1:
        raise ParseError("premise must be a single atom", line)
    prem = premise[0]
    rhs_exists = re.match(rf"^exists\s+({IDENT})\s*:(.*)$", rhs)
    if prem.arity != 1:
        if rhs_exists or prem.arity != 2:
            raise ParseError("non-unary premise", line)
        concl = parse_atom_list(rhs, line)
        u, v = prem.args
        if u == v or len(concl) != 1 or concl[0].arity != 2:
            raise ParseError("non-unary premise", line)
        c = concl[0]
        if c.args == (u, v):
            return RoleInclusion(prem.pred, c.pred, False)
        if c.args == (v, u):
            return RoleInclusion(prem.pred, c.pred, True)
        raise ParseError("role inclusion must reuse the premise variables", line)
    x = prem.args[0]
    if rhs_exists:
        y = rhs_exists.group(1)
        if y == x:
            raise ParseError("existential variable must differ from the premise variable", line)
        concl = parse_atom_list(rhs_exists.group(2), line)
        if not concl:
            raise ParseError("existential rule needs at least one conclusion atom", line)
        rename = {x: "x", y: "y"}
        out = []
        for a in concl:
            if any(arg not in rename for arg in a.args):
                raise ParseError(f"conclusion atom {a} may only use {x} and {y}", line)
            out.append(a.rename(rename))
        try:
            return ExistentialRule(prem.pred, tuple(out))
        except ValidationError as exc:
            raise ParseError(str(exc), line) from None
    concl = parse_atom_list(rhs, line)
    if len(concl) != 1 or concl[0].args != (x,):
        raise ParseError("concept inclusion must be A(x) -> B(x)", line)
    return ConceptInclusion(prem.pred, concl[0].pred)


def parse_ontology(text: str) -> Ontology:
    axioms: list[Axiom] = []
    seen: list[tuple[Atom, int]] = []
    datasig: set[str] | None = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip_comment(raw)
        if not line:
            continue
        if line.startswith("datasig"):
            names = [s.strip() for s in line[len("datasig"):].split(",") if s.strip()]
            if not all(_IDENT_RE.match(n) for n in names):
                raise ParseError("datasig expects a comma-separated predicate list", lineno)
            datasig = (datasig or set()) | set(names)
            continue
        axiom = _parse_axiom(line, lineno)
        seen.extend((a, lineno) for a in axiom_atoms(axiom))
        axioms.append(axiom)
    _check_arities(seen)
    return Ontology(tuple(axioms), None if datasig is None else frozenset(datasig))


def format_axiom(axiom: Axiom) -> str:
    if isinstance(axiom, ConceptInclusion):
        return f"{axiom.sub}(x) -> {axiom.sup}(x)"
    if isinstance(axiom, RoleInclusion):
        target = "y,x" if axiom.inverted else "x,y"
        return f"{axiom.sub}(x,y) -> {axiom.sup}({target})"
    return f"{axiom.premise}(x) -> exists y: " + ", ".join(map(str, axiom.conclusion))


def format_ontology(ontology: Ontology) -> str:
    lines = [format_axiom(ax) for ax in ontology.axioms]
    if ontology.data_signature is not None:
        lines.append("datasig " + ", ".join(sorted(ontology.data_signature)))
    return "".join(line + "\n" for line in lines)


def _is_variable(term: str) -> bool:
    return bool(_IDENT_RE.match(term)) and not term[0].isdigit()


def parse_query(text: str) -> ConjunctiveQuery:
    lines = [(i, _strip_comment(l)) for i, l in enumerate(text.splitlines(), 1)]
    lines = [(i, l) for i, l in lines if l]
    if len(lines) != 1:
        raise ParseError("query file must contain exactly one query line", lines[1][0] if lines else None)
    lineno, line = lines[0]
    m = re.match(rf"^({IDENT})\s*\(([^()]*)\)\s*:-(.*)$", line)
    if not m:
        raise ParseError("expected 'q(x,...) :- atom, ...'", lineno)
    head = [s.strip() for s in m.group(2).split(",")] if m.group(2).strip() else []
    atoms = parse_atom_list(m.group(3), lineno)
    for a in atoms:
        for arg in a.args:
            if not _is_variable(arg):
                raise ParseError(f"constant {arg!r} in query body", lineno)
    for v in head:
        if not _is_variable(v):
            raise ParseError(f"bad head variable {v!r}", lineno)
    _check_arities((a, lineno) for a in atoms)
    try:
        return ConjunctiveQuery(tuple(head), tuple(atoms), m.group(1))
    except ValidationError as exc:
        raise ParseError(str(exc), lineno) from None


def format_query(q: ConjunctiveQuery) -> str:
    body = ", ".join(map(str, q.atoms)) if q.atoms else "true"
    return f"{q.name}({','.join(q.answer_vars)}) :- {body}"


def parse_data(text: str) -> DataInstance:
    facts: list[tuple[Atom, int]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip_comment(raw)
        if not line:
            continue
        parsed = parse_atom_list(line, lineno)
        if len(parsed) != 1:
            raise ParseError("one fact per line", lineno)
        for arg in parsed[0].args:
            if not _CONST_RE.match(arg):
                raise ParseError(f"bad constant {arg!r}", lineno)
        facts.append((parsed[0], lineno))
    _check_arities(facts)
    return DataInstance.from_facts(a for a, _ in facts)


def format_data(data: DataInstance) -> str:
    return "".join(f"{a}\n" for a in data.facts)
