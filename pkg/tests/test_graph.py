import pytest

from twopaths.errors import InvalidTerminals
from twopaths.graph import build_system, digraph, normalize, split_nodes, standardize
from twopaths.oracle import brute_force_class

U = ("u1", "u2")
Y = ("y1", "y2")


def test_already_normalized_unchanged():
    g = digraph([("u1", "y1"), ("u2", "y2")], U, Y)
    out = normalize(g)
    assert set(out.edges) == set(g.edges)
    assert out.inputs == U and out.outputs == Y


def test_self_loop_subdivided():
    g = digraph([("u1", "v"), ("v", "v"), ("v", "y1")], U, Y)
    out = normalize(g)
    assert len(out.nodes) == len(g.nodes) + 1
    assert len(out.edges) == len(g.edges) + 1
    assert all(a != b for a, b in out.edges)


def test_parallel_edge_subdivided():
    g = digraph([("a", "b"), ("a", "b"), ("u1", "a"), ("b", "y1")], U, Y)
    out = normalize(g)
    assert len(set(out.edges)) == len(out.edges)
    pair_count = sum(1 for a, b in out.edges if (a, b) == ("a", "b"))
    assert pair_count == 1
    # subdivision preserves the path class (checked by the search oracle)
    assert brute_force_class(out).kind == brute_force_class(normalize(g)).kind


def test_terminal_degree_fixes():
    g = digraph([("v", "u1"), ("u1", "y1"), ("y1", "w"), ("u2", "y2")], U, Y)
    out = normalize(g)
    heads = {b for _, b in out.edges}
    tails = {a for a, _ in out.edges}
    for u in out.inputs:
        assert u not in heads
    for y in out.outputs:
        assert y not in tails
    assert out.original_node(out.inputs[0]) == "u1"
    assert out.original_node(out.outputs[0]) == "y1"


def test_duplicate_terminals_rejected():
    with pytest.raises(InvalidTerminals):
        digraph([("u1", "y1")], ("u1", "u1"), Y)
    with pytest.raises(InvalidTerminals):
        digraph([("u1", "y1")], U, ("y1", "u2"))


def test_normalize_idempotent():
    g = digraph(
        [("u1", "u1"), ("a", "a"), ("a", "b"), ("a", "b"), ("b", "u2"), ("y1", "a")],
        U,
        Y,
    )
    once = normalize(g)
    twice = normalize(once)
    assert set(twice.edges) == set(once.edges)
    assert twice.inputs == once.inputs and twice.outputs == once.outputs


def test_split_star():
    g = digraph([("u1", "v"), ("u2", "v"), ("v", "y1"), ("v", "y2")], U, Y)
    out = split_nodes(normalize(g))
    assert len(out.edges) == 5
    assert "v" not in out.nodes
    split_parts = [v for v in out.nodes if out.original_node(v) == "v"]
    assert len(split_parts) == 2


def test_split_skips_pure_path():
    g = digraph([("u1", "a"), ("a", "y1")], U, Y)
    assert split_nodes(normalize(g)) == normalize(g)


def test_split_idempotent():
    g = digraph(
        [("u1", "v"), ("u2", "v"), ("v", "y1"), ("v", "y2"), ("v", "w"), ("a", "v")],
        U,
        Y,
        extra_nodes=["a", "w"],
    )
    once = split_nodes(normalize(g))
    assert split_nodes(once) == once


def test_post_split_degree_property():
    g = digraph(
        [
            ("u1", "a"), ("u2", "a"), ("b", "a"), ("a", "b"), ("a", "y1"),
            ("b", "y2"), ("b", "c"), ("c", "b"), ("c", "a"),
        ],
        U,
        Y,
    )
    sfg, _ = build_system(standardize(g))
    terminals = set(sfg.inputs) | set(sfg.outputs)
    for v in sfg.nodes:
        if v not in terminals:
            assert min(sfg.in_degree.get(v, 0), sfg.out_degree.get(v, 0)) <= 1


def test_build_single_path_system():
    g = digraph([("u1", "a"), ("a", "y1")], U, Y)
    sfg, st = build_system(standardize(g))
    # lexicographic branch order: (a,y1) then (u1,a)
    assert [(b.tail, b.head) for b in sfg.branches] == [("a", "y1"), ("u1", "a")]
    assert st.a0 == ((0, 1), (0, 0))
    assert [row[0] for row in st.b] == [0, 1]
    assert st.c[0] == (1, 0)
    assert st.c[1] == (0, 0)


def test_build_disjoint_edges_system():
    g = digraph([("u1", "y1"), ("u2", "y2")], U, Y)
    _, st = build_system(standardize(g))
    assert st.a0 == ((0, 0), (0, 0))
    assert st.b == ((1, 0), (0, 1))
    assert st.c == ((1, 0), (0, 1))


def test_build_split_star_feeding_count():
    g = digraph([("u1", "v"), ("u2", "v"), ("v", "y1"), ("v", "y2")], U, Y)
    _, st = build_system(standardize(g))
    assert st.n == 5
    assert sum(sum(row) for row in st.a0) == 4


def test_a0_against_recount():
    g = digraph(
        [("u1", "a"), ("a", "b"), ("b", "a"), ("b", "y1"), ("u2", "b"), ("a", "y2")],
        U,
        Y,
    )
    sfg, st = build_system(standardize(g))
    ones = sum(sum(row) for row in st.a0)
    recount = sum(
        1
        for bi in sfg.branches
        for bj in sfg.branches
        if bj.head == bi.tail
    )
    assert ones == recount


def test_class_preserved_by_standardization():
    # small suite exercising self-loops, parallels, terminal fixes, splits
    cases = [
        [("u1", "y1"), ("u2", "y2")],
        [("u1", "v"), ("u2", "v"), ("v", "y1"), ("v", "y2")],
        [("u1", "u1"), ("u1", "y2"), ("u2", "y1")],
        [("a", "u1"), ("u1", "a"), ("a", "y1"), ("u2", "y2"), ("y1", "u2")],
        [("u1", "a"), ("u1", "a"), ("a", "y1"), ("a", "y2"), ("u2", "a")],
        [("u2", "u1")],
        [],
    ]
    for edges in cases:
        g = digraph(edges, U, Y)
        before = brute_force_class(g).kind
        after = brute_force_class(standardize(g)).kind
        assert before == after, edges
