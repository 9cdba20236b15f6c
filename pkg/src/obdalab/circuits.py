"""Boolean circuits with certificate inputs, and nondeterministic branching programs."""
from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass
from typing import Sequence

from .hgp import Label, parse_label
from .logic import ParseError, ValidationError

OPS = ("input", "const", "not", "and", "or", "ormulti")


@dataclass(frozen=True)
class Gate:
    op: str
    args: tuple = ()  # input: (cls, index); const: (bit,); others: gate indices

    def __post_init__(self):
        if self.op not in OPS:
            raise ValidationError(f"unknown gate {self.op!r}")
        object.__setattr__(self, "args", tuple(self.args))

    @property
    def inputs(self) -> tuple[int, ...]:
        return () if self.op in ("input", "const") else self.args


def Input(cls: str, index: int) -> Gate:
    return Gate("input", (cls, index))


def Const(bit: int) -> Gate:
    return Gate("const", (bit,))


def Not(g: int) -> Gate:
    return Gate("not", (g,))


def And(g: int, h: int) -> Gate:
    return Gate("and", (g, h))


def Or(g: int, h: int) -> Gate:
    return Gate("or", (g, h))


def OrMulti(*gs: int) -> Gate:
    return Gate("ormulti", gs)


@dataclass(frozen=True)
class Circuit:
    gates: tuple[Gate, ...]
    output: int
    n: int  # number of x-inputs
    m: int = 0  # number of y-inputs
    allow_unbounded_or: bool = False

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        if not 0 <= self.output < len(self.gates):
            raise ValidationError("output refers to a missing gate")
        for i, g in enumerate(self.gates):
            for j in g.inputs:
                if not 0 <= j < i:
                    raise ValidationError(f"gate {i} refers to gate {j}, which is not earlier")
            if g.op == "input":
                cls, k = g.args
                bound = self.n if cls == "x" else self.m if cls == "y" else -1
                if not 0 <= k < bound:
                    raise ValidationError(f"gate {i}: input {cls}{k + 1} out of range")
            elif g.op == "const" and g.args[0] not in (0, 1):
                raise ValidationError(f"gate {i}: constant must be 0 or 1")
            elif g.op == "not" and len(g.args) != 1:
                raise ValidationError(f"gate {i}: not takes one input")
            elif g.op in ("and", "or") and len(g.args) != 2:
                raise ValidationError(f"gate {i}: {g.op} takes two inputs")
            elif g.op == "ormulti":
                if not self.allow_unbounded_or:
                    raise ValidationError("unbounded fan-in or requires allow_unbounded_or")
                if not g.args:
                    raise ValidationError(f"gate {i}: ormulti needs inputs")

    @property
    def size(self) -> int:
        return len(self.gates)

    def values(self, x: Sequence[int], y: Sequence[int] = ()) -> list[int]:
        if len(x) != self.n or len(y) != self.m:
            raise ValueError(f"expected {self.n} x-bits and {self.m} y-bits")
        val: list[int] = []
        for g in self.gates:
            if g.op == "input":
                cls, k = g.args
                v = int(bool((x if cls == "x" else y)[k]))
            elif g.op == "const":
                v = g.args[0]
            elif g.op == "not":
                v = 1 - val[g.args[0]]
            elif g.op == "and":
                v = val[g.args[0]] & val[g.args[1]]
            else:
                v = int(any(val[j] for j in g.args))
            val.append(v)
        return val

    def __str__(self) -> str:
        return format_circuit(self)


def eval_circuit(c: Circuit, x: Sequence[int], y: Sequence[int] = ()) -> bool:
    return bool(c.values(x, y)[c.output])


def fan_out(c: Circuit) -> list[int]:
    out = [0] * len(c.gates)
    for g in c.gates:
        for j in g.inputs:
            out[j] += 1
    return out


def is_formula(c: Circuit) -> bool:
    return all(k <= 1 for k in fan_out(c))


def is_monotone(c: Circuit) -> bool:
    return all(g.op != "not" for g in c.gates)


def negations_only_on_y(c: Circuit) -> bool:
    """Monotone in the NP/poly sense: every Not is applied directly to a y-input."""
    for g in c.gates:
        if g.op == "not":
            src = c.gates[g.args[0]]
            if src.op != "input" or src.args[0] != "y":
                return False
    return True


def depth(c: Circuit) -> int:
    d: list[int] = []
    for g in c.gates:
        d.append(1 + max(d[j] for j in g.inputs) if g.inputs else 0)
    return d[c.output]


class CircuitBuilder:
    """Append-only gate list with hash-consing of identical gates."""

    def __init__(self, n: int, m: int = 0):
        self.n, self.m = n, m
        self.gates: list[Gate] = []
        self._index: dict[Gate, int] = {}

    def add(self, gate: Gate) -> int:
        hit = self._index.get(gate)
        if hit is None:
            hit = self._index[gate] = len(self.gates)
            self.gates.append(gate)
        return hit

    def x(self, k: int) -> int:
        return self.add(Input("x", k))

    def y(self, k: int) -> int:
        return self.add(Input("y", k))

    def balanced(self, op: str, items: Sequence[int], empty: int) -> int:
        """Fan-in-2 tree of ``op`` over items; ``empty`` is the unit constant."""
        if not items:
            return self.add(Const(empty))
        layer = list(items)
        while len(layer) > 1:
            nxt = [self.add(Gate(op, (layer[i], layer[i + 1]))) for i in range(0, len(layer) - 1, 2)]
            if len(layer) % 2:
                nxt.append(layer[-1])
            layer = nxt
        return layer[0]

    def build(self, output: int) -> Circuit:
        return Circuit(tuple(self.gates), output, self.n, self.m)


def parse_circuit(text: str) -> Circuit:
    names: dict[str, int] = {}
    gates: list[Gate] = []
    output = None
    n = m = 0
    declared: tuple[int, int] | None = None
    for lineno, raw in enumerate(text.replace(";", "\n").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        mo = re.match(r"^output\s+(\w+)$", line)
        if mo:
            if mo.group(1) not in names:
                raise ParseError(f"unknown gate {mo.group(1)}", lineno)
            output = names[mo.group(1)]
            continue
        mi = re.match(r"^inputs\s+(\d+)\s+(\d+)$", line)
        if mi:
            declared = (int(mi.group(1)), int(mi.group(2)))
            continue
        mg = re.match(r"^(\w+)\s*=\s*(\w+)\s*(.*)$", line)
        if not mg:
            raise ParseError(f"cannot parse {line!r}", lineno)
        name, op, rest = mg.group(1), mg.group(2), mg.group(3).split()
        if name in names:
            raise ParseError(f"gate {name} defined twice", lineno)
        try:
            if op == "input":
                mv = re.match(r"^([xy])(\d+)$", rest[0]) if len(rest) == 1 else None
                if not mv or int(mv.group(2)) < 1:
                    raise ParseError("expected 'input x<k>' or 'input y<k>'", lineno)
                k = int(mv.group(2)) - 1
                if mv.group(1) == "x":
                    n = max(n, k + 1)
                else:
                    m = max(m, k + 1)
                gate = Input(mv.group(1), k)
            elif op == "const" and rest in (["0"], ["1"]):
                gate = Const(int(rest[0]))
            elif op in ("not", "and", "or", "ormulti"):
                refs = []
                for r in rest:
                    if r not in names:
                        raise ParseError(f"unknown gate {r}", lineno)
                    refs.append(names[r])
                gate = Gate(op, tuple(refs))
            else:
                raise ParseError(f"cannot parse {line!r}", lineno)
        except ValidationError as exc:
            raise ParseError(str(exc), lineno) from None
        names[name] = len(gates)
        gates.append(gate)
    if output is None:
        raise ParseError("missing 'output g<i>' line")
    if declared:
        n, m = max(n, declared[0]), max(m, declared[1])
    unbounded = any(g.op == "ormulti" for g in gates)
    try:
        return Circuit(tuple(gates), output, n, m, unbounded)
    except ValidationError as exc:
        raise ParseError(str(exc)) from None


def format_circuit(c: Circuit) -> str:
    lines = [f"inputs {c.n} {c.m}"]
    for i, g in enumerate(c.gates, 1):
        if g.op == "input":
            rhs = f"input {g.args[0]}{g.args[1] + 1}"
        elif g.op == "const":
            rhs = f"const {g.args[0]}"
        else:
            rhs = g.op + " " + " ".join(f"g{j + 1}" for j in g.args)
        lines.append(f"g{i} = {rhs}")
    lines.append(f"output g{c.output + 1}")
    return "".join(l + "\n" for l in lines)


# ---------------------------------------------------------------------------
# branching programs


@dataclass(frozen=True)
class BranchingProgram:
    vertices: tuple[str, ...]
    edges: tuple[tuple[str, str, Label], ...]
    s: str
    t: str
    num_vars: int

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", tuple(self.edges))
        vs = set(self.vertices)
        if self.s == self.t:
            raise ValidationError("s and t must differ")
        if self.s not in vs or self.t not in vs:
            raise ValidationError("s and t must be vertices")
        for u, v, lab in self.edges:
            if u not in vs or v not in vs:
                raise ValidationError(f"edge {u}->{v} uses an unknown vertex")
            if lab.kind != "const" and not 0 <= lab.value < self.num_vars:
                raise ValidationError(f"edge label {lab} outside x1..x{self.num_vars}")

    @property
    def size(self) -> int:
        return len(self.vertices) + len(self.edges)

    def is_monotone(self) -> bool:
        return all(lab.kind != "neg" for _, _, lab in self.edges)


def eval_nbp(p: BranchingProgram, x: Sequence[int]) -> bool:
    if len(x) != p.num_vars:
        raise ValueError(f"expected {p.num_vars} input bits, got {len(x)}")
    succ: dict[str, list[str]] = {v: [] for v in p.vertices}
    for u, v, lab in p.edges:
        if lab.evaluate(x):
            succ[u].append(v)
    seen, queue = {p.s}, deque([p.s])
    while queue:
        u = queue.popleft()
        if u == p.t:
            return True
        for v in succ[u]:
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return False


def parse_nbp(text: str) -> BranchingProgram:
    num_vars = None
    vertices: dict[str, None] = {}
    edges = []
    s = t = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        parts = raw.split("#", 1)[0].split()
        if not parts:
            continue
        try:
            if parts[0] == "vars" and len(parts) == 2:
                num_vars = int(parts[1])
            elif parts[0] == "source" and len(parts) == 2:
                s = parts[1]
                vertices.setdefault(s)
            elif parts[0] == "sink" and len(parts) == 2:
                t = parts[1]
                vertices.setdefault(t)
            elif parts[0] == "vertex" and len(parts) == 2:
                vertices.setdefault(parts[1])
            elif parts[0] == "edge" and len(parts) == 4:
                vertices.setdefault(parts[1])
                vertices.setdefault(parts[2])
                edges.append((parts[1], parts[2], parse_label(parts[3])))
            else:
                raise ParseError(f"cannot parse {raw.strip()!r}", lineno)
        except ValidationError as exc:
            raise ParseError(str(exc), lineno) from None
    if s is None or t is None:
        raise ParseError("missing 'source' or 'sink' line")
    if num_vars is None:
        num_vars = max((lab.value + 1 for _, _, lab in edges if lab.kind != "const"), default=0)
    try:
        return BranchingProgram(tuple(vertices), tuple(edges), s, t, num_vars)
    except ValidationError as exc:
        raise ParseError(str(exc)) from None


def format_nbp(p: BranchingProgram) -> str:
    lines = [f"vars {p.num_vars}", f"source {p.s}", f"sink {p.t}"]
    lines += [f"vertex {v}" for v in p.vertices if v not in (p.s, p.t)]
    lines += [f"edge {u} {v} {lab}" for u, v, lab in p.edges]
    return "".join(l + "\n" for l in lines)
