import random
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from obdalab.circuits import (
    And,
    BranchingProgram,
    Circuit,
    CircuitBuilder,
    Const,
    Input,
    Not,
    Or,
    depth,
    eval_circuit,
    eval_nbp,
    format_circuit,
    format_nbp,
    is_formula,
    is_monotone,
    negations_only_on_y,
    parse_circuit,
    parse_nbp,
)
from obdalab.generators import random_circuit, random_hgp
from obdalab.hgp import CONST0, CONST1, HypergraphProgram, Var, degree, eval_hgp, is_monotone as hgp_monotone
from obdalab.logic import ParseError, ValidationError
from obdalab.translate import (
    BoundExceeded,
    circuit_to_hgp3,
    counterexample,
    equiv_exists,
    exists_projection,
    hgp_to_np_circuit,
)


def table(f, n):
    return tuple(bool(f(x)) for x in product((0, 1), repeat=n))


def test_circuit_basics():
    c = Circuit((Input("x", 0), Input("x", 1), And(0, 1)), 2, 2)
    assert eval_circuit(c, (1, 1)) and not eval_circuit(c, (1, 0))
    nor = Circuit((Input("x", 0), Input("x", 1), Or(0, 1), Not(2)), 3, 2)
    assert not is_monotone(nor)
    assert depth(nor) == 2
    reuse = Circuit((Input("x", 0), Not(0), And(1, 1)), 2, 1)
    assert not is_formula(reuse)
    assert is_formula(c)


def test_circuit_validation():
    with pytest.raises(ValidationError):
        Circuit((Input("x", 0), And(0, 2)), 1, 1)
    with pytest.raises(ValidationError):
        Circuit((Input("x", 3),), 0, 1)
    with pytest.raises(ParseError):
        parse_circuit("g1 = input x1\noutput g9")


def test_circuit_file_round_trip():
    c = parse_circuit("g1 = input x1; g2 = input y1; g3 = and g1 g2; output g3")
    assert (c.n, c.m) == (1, 1)
    assert parse_circuit(format_circuit(c)) == c


def test_nbp():
    single = parse_nbp("source s\nsink t\nedge s t x1\n")
    assert table(lambda x: eval_nbp(single, x), 1) == (False, True)
    chain = parse_nbp("source s\nsink t\nedge s v x1\nedge v t x2\n")
    assert table(lambda x: eval_nbp(chain, x), 2) == (False, False, False, True)
    par = parse_nbp("source s\nsink t\nedge s t x1\nedge s t x2\n")
    assert table(lambda x: eval_nbp(par, x), 2) == (False, True, True, True)
    assert parse_nbp(format_nbp(chain)) == chain
    with pytest.raises(ValidationError):
        BranchingProgram(("s",), (), "s", "s", 0)


def two_edges():
    return HypergraphProgram(
        ("u", "v", "w"), {"u": Var(0), "v": Var(1), "w": Var(2)},
        (("e1", frozenset({"u", "v"})), ("e2", frozenset({"v", "w"}))), 3)


def test_hgp_to_circuit_worked_example():
    h = two_edges()
    c = hgp_to_np_circuit(h)
    assert c.m == 2
    assert equiv_exists(c, h)


def test_hgp_to_circuit_constant_one():
    h = HypergraphProgram(("a",), {"a": CONST1}, (), 0)
    c = hgp_to_np_circuit(h)
    assert eval_circuit(c, ())


def test_monotone_program_negates_only_y():
    h = HypergraphProgram(("u", "v"), {"u": Var(0), "v": Var(1)},
                          (("e", frozenset({"u", "v"})), ("f", frozenset({"v"}))), 2)
    assert negations_only_on_y(hgp_to_np_circuit(h))


@pytest.mark.parametrize("text,n", [
    ("g1 = input x1; output g1", 1),
    ("g1 = input x1; g2 = input x2; g3 = not g2; g4 = and g1 g3; output g4", 2),
    ("g1 = input x1; g2 = input y1; g3 = and g1 g2; output g3", 1),
    ("g1 = const 0; output g1", 0),
    ("g1 = const 1; output g1", 0),
    ("g1 = input x1; g2 = or g1 g1; g3 = not g2; g4 = and g3 g3; output g4", 1),
])
def test_circuit_to_hgp3_examples(text, n):
    c = parse_circuit(text)
    for mono in (False, True):
        h = circuit_to_hgp3(c, monotone=mono)
        assert degree(h) <= 3
        assert equiv_exists(c, h, monotone=mono)
    assert h.num_vars == n


def test_and_x_not_x_truth_table():
    c = parse_circuit("g1 = input x1; g2 = input x2; g3 = not g2; g4 = and g1 g3; output g4")
    h = circuit_to_hgp3(c)
    assert table(lambda x: eval_hgp(h, x), 2) == (False, False, True, False)


def test_exists_projection_of_and_with_y():
    c = parse_circuit("g1 = input x1; g2 = input y1; g3 = and g1 g2; output g3")
    h = circuit_to_hgp3(c)
    assert table(lambda x: eval_hgp(h, x), 1) == (False, True)


def test_equiv_exists_trivia():
    zero = Circuit((Const(0),), 0, 0)
    dead = HypergraphProgram(("a",), {"a": CONST0}, (), 0)
    assert equiv_exists(zero, dead)
    x1 = parse_circuit("inputs 2 0; g1 = input x1; output g1")
    prog_x2 = HypergraphProgram(("a",), {"a": Var(1)}, (), 2)
    assert not equiv_exists(x1, prog_x2)
    assert counterexample(x1, prog_x2) == (0, 1)
    with pytest.raises(BoundExceeded):
        equiv_exists(x1, prog_x2, max_n=1)


def test_builder_hash_consing():
    b = CircuitBuilder(2)
    assert b.x(0) == b.x(0)
    top = b.balanced("and", [b.x(0), b.x(1)], 1)
    assert b.add(And(0, 1)) == top
    assert b.build(b.balanced("or", [], 0)).gates[-1] == Const(0)


seeds = st.integers(min_value=0, max_value=10**6)


@settings(max_examples=150, deadline=None)
@given(seeds)
def test_round_trip_circuit_to_hgp(seed):
    c = random_circuit(random.Random(seed), max_gates=10)
    for mono in (False, True):
        h = circuit_to_hgp3(c, monotone=mono)
        assert degree(h) <= 3
        assert equiv_exists(c, h, monotone=mono)
        assert h.size <= 12 * c.size + 1


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_round_trip_hgp_to_circuit(seed):
    h = random_hgp(random.Random(seed), max_vertices=8, max_edges=5)
    c = hgp_to_np_circuit(h)
    assert equiv_exists(c, h)
    assert parse_circuit(format_circuit(c)) == c


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_monotone_mode_program_is_monotone(seed):
    c = random_circuit(random.Random(seed))
    h = circuit_to_hgp3(c, monotone=True)
    assert hgp_monotone(h)
    for x in product((0, 1), repeat=c.n):
        for i in range(c.n):
            if not x[i] and eval_hgp(h, x):
                assert eval_hgp(h, x[:i] + (1,) + x[i + 1:])
