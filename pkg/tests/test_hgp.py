import random
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from obdalab.generators import random_hgp
from obdalab.hgp import (
    CONST0,
    CONST1,
    HypergraphProgram,
    StructureError,
    Var,
    check_path_program,
    degree,
    eval_hgp,
    eval_hgp_bruteforce,
    format_hgp,
    is_monotone,
    is_path_program,
    is_tree_program,
    normalize_edge_variables,
    parse_hgp,
    truth_table,
)
from obdalab.logic import ParseError, ValidationError


def two_edges():
    return HypergraphProgram(
        ("u", "v", "w"), {"u": Var(0), "v": Var(1), "w": Var(2)},
        (("e1", frozenset({"u", "v"})), ("e2", frozenset({"v", "w"}))), 3)


def test_worked_example():
    h = two_edges()
    assert eval_hgp(h, (0, 1, 0)) is False
    # frozen truth table, derived by hand (x1 x2 x3 in lexicographic order)
    assert truth_table(h) == truth_table(h, eval_hgp_bruteforce)
    assert truth_table(h) == (False, True, False, True, True, True, True, True)


def test_all_ones_and_uncoverable_zero():
    h = HypergraphProgram(("a", "b"), {"a": CONST1, "b": CONST1}, (("e", frozenset({"a"})),), 2)
    assert all(truth_table(h))
    z = HypergraphProgram(("a",), {"a": CONST0}, (), 1)
    assert not any(truth_table(z))


def test_degree_and_path():
    h = HypergraphProgram(
        ("u", "v", "w", "z"), {k: CONST1 for k in "uvwz"},
        (("e1", frozenset("uv")), ("e2", frozenset("vw")), ("e3", frozenset("vz"))), 0)
    assert degree(h) == 3
    skip = HypergraphProgram(("u", "v", "w"), {k: CONST1 for k in "uvw"},
                             (("e", frozenset("uw")),), 0, order=("u", "v", "w"))
    assert not is_path_program(skip)
    with pytest.raises(StructureError) as info:
        check_path_program(skip)
    assert info.value.edge == "e"
    ok = HypergraphProgram(("u", "v", "w"), {k: CONST1 for k in "uvw"},
                           (("e", frozenset("uv")),), 0, order=("u", "v", "w"))
    assert is_path_program(ok)


def test_tree_program():
    base = dict(vertices=("r", "a", "b"), labels={k: CONST1 for k in "rab"}, num_vars=0,
                tree=(("r", "a"), ("r", "b")))
    assert is_tree_program(HypergraphProgram(edges=(("e", frozenset("ra")),), **base))
    assert not is_tree_program(HypergraphProgram(edges=(("e", frozenset("ab")),), **base))


def test_validation():
    with pytest.raises(ValidationError):
        HypergraphProgram(("u",), {"u": Var(3)}, (), 2)
    with pytest.raises(ValidationError):
        HypergraphProgram(("u",), {"u": CONST0}, (("e", frozenset({"q"})),), 0)
    with pytest.raises(ParseError):
        parse_hgp("vertex u x1\nedge e u\nbogus line\n")
    with pytest.raises(ValueError):
        eval_hgp(two_edges(), (0, 1))


def test_file_round_trip(data_dir):
    h = parse_hgp((data_dir / "two_edges.hgp").read_text())
    assert eval_hgp(h, (0, 1, 0)) is False
    assert parse_hgp(format_hgp(h)) == h


def test_edge_variable_normalisation_example():
    # e = {u} guarded by x2, u labelled x1
    h = HypergraphProgram(("u",), {"u": Var(0)}, (("e", frozenset({"u"})),), 2, edge_vars={"e": 1})
    n = normalize_edge_variables(h)
    assert not n.edge_vars
    assert truth_table(n) == truth_table(h) == truth_table(h, eval_hgp_bruteforce)
    assert truth_table(h) == (False, True, True, True)  # x1 or x2
    assert normalize_edge_variables(two_edges()) == two_edges()


def test_guard_fixed_zero_is_like_deleting_the_edge():
    rng = random.Random(3)
    for _ in range(50):
        h = random_hgp(rng, max_edges=4)
        if not h.edges:
            continue
        e = h.edges[0][0]
        guarded = HypergraphProgram(h.vertices, h.labels, h.edges, h.num_vars + 1,
                                    edge_vars={e: h.num_vars})
        deleted = HypergraphProgram(h.vertices, h.labels, h.edges[1:], h.num_vars)
        for x in product((0, 1), repeat=h.num_vars):
            assert eval_hgp(guarded, (*x, 0)) == eval_hgp(deleted, x)
            assert eval_hgp(normalize_edge_variables(guarded), (*x, 0)) == eval_hgp(deleted, x)


seeds = st.integers(min_value=0, max_value=10**6)


@settings(max_examples=200, deadline=None)
@given(seeds)
def test_eval_matches_oracle(seed):
    h = random_hgp(random.Random(seed), max_vertices=8, max_edges=8, max_vars=6)
    assert truth_table(h) == truth_table(h, eval_hgp_bruteforce)


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_monotone_programs_compute_monotone_functions(seed):
    h = random_hgp(random.Random(seed), monotone=True)
    assert is_monotone(h)
    for x in product((0, 1), repeat=h.num_vars):
        if eval_hgp(h, x):
            for i in range(h.num_vars):
                if not x[i]:
                    assert eval_hgp(h, x[:i] + (1,) + x[i + 1:])


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_normalisation_preserves_semantics(seed):
    rng = random.Random(seed)
    h = random_hgp(rng, max_vars=4)
    guards = {e: rng.randrange(h.num_vars) for e, _ in h.edges if rng.random() < 0.5}
    g = HypergraphProgram(h.vertices, h.labels, h.edges, h.num_vars, edge_vars=guards)
    assert truth_table(normalize_edge_variables(g)) == truth_table(g, eval_hgp_bruteforce)
    assert parse_hgp(format_hgp(g)) == g
