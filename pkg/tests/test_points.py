import random

from twopaths.graph import build_system, digraph, standardize
from twopaths.points import (
    Decision,
    decide,
    random_distinct_points,
    structural_rank_zero,
    sweep_points,
)
from twopaths.resolvent import rank_at_point

U = ("u1", "u2")
Y = ("y1", "y2")


def system(edges, extra=()):
    return build_system(standardize(digraph(edges, U, Y, extra_nodes=extra)))[1]


def test_point_family_n1():
    pts = sweep_points(1)
    assert [p.values for p in pts] == [(1,), (0,), (2,)]


def test_point_family_n2():
    pts = sweep_points(2)
    assert [p.values for p in pts] == [
        (2, 4), (1, 4), (2, 3), (3, 4), (2, 5),
        (4, 16), (3, 16), (4, 15),
    ]
    assert [p.family for p in pts] == [1] * 5 + [2] * 3


def test_point_count_n3():
    pts = sweep_points(3)
    assert len(pts) == 15
    assert sum(1 for p in pts if p.family == 1) == 7
    assert sum(1 for p in pts if p.family == 2) == 4
    assert sum(1 for p in pts if p.family == 3) == 4


def test_point_count_formula():
    for n in range(1, 13):
        assert len(sweep_points(n)) == n * n + 2 * n


def test_decide_disjoint_edges():
    d = decide(system([("u1", "y1"), ("u2", "y2")]))
    assert d.rank == 2
    assert d.witness is not None and d.witness.label == "f1:base"
    assert d.points_evaluated == 1


def test_decide_split_star_full_sweep():
    st = system([("u1", "v"), ("u2", "v"), ("v", "y1"), ("v", "y2")])
    d = decide(st, "full-sweep")
    assert d.rank == 1
    assert d.witness is None
    assert len(d.table) == st.n * st.n + 2 * st.n == 35
    assert all(pr.rank == 1 for pr in d.table)
    assert all(pr.delta is not None and pr.delta.is_zero() for pr in d.table)


def test_decide_no_edges():
    st = system([])
    d = decide(st)
    assert d == Decision(0, 0, None, 0, None, None)


def test_structural_zero_shortcut():
    # u-side and y-side both wired, but never to each other
    st = system([("u1", "a"), ("u2", "a"), ("b", "y1"), ("b", "y2")], extra=["a", "b"])
    assert structural_rank_zero(st)
    d = decide(st)
    assert d.rank == 0 and d.structural_zero and d.points_evaluated == 0
    full = decide(st, "full-sweep")
    assert full.rank == 0 and not full.structural_zero
    assert all(pr.rank == 0 for pr in full.table)


def test_modes_agree_on_random_graphs():
    rng = random.Random(5)
    nodes = ["u1", "u2", "y1", "y2", "v1", "v2"]
    pairs = [(a, b) for a in nodes for b in nodes]
    done = 0
    while done < 40:
        edges = [pairs[rng.randrange(len(pairs))] for _ in range(rng.randint(1, 9))]
        st = system(edges, extra=nodes)
        if st.n == 0:
            continue
        full = decide(st, "full-sweep")
        early = decide(st)
        assert full.rank == early.rank
        if full.rank == 2:
            assert early.witness.values == full.witness.values
        done += 1


def test_full_table_matches_direct_recurrence():
    # the perturbation engine must agree with a from-scratch computation
    rng = random.Random(17)
    nodes = ["u1", "u2", "y1", "y2", "v1"]
    pairs = [(a, b) for a in nodes for b in nodes]
    done = 0
    while done < 12:
        edges = [pairs[rng.randrange(len(pairs))] for _ in range(rng.randint(1, 8))]
        st = system(edges, extra=nodes)
        if not 1 <= st.n <= 7:
            continue
        full = decide(st, "full-sweep")
        for pr in full.table:
            direct = rank_at_point(st, pr.point)
            assert direct.rank == pr.rank
            assert direct.delta == pr.delta
        done += 1


def test_decision_deterministic():
    st = system([("u1", "v"), ("u2", "v"), ("v", "y1"), ("v", "y2"), ("u1", "y2")])
    a = decide(st, "full-sweep")
    b = decide(st, "full-sweep")
    assert a == b


def test_monotone_consistency():
    # any rank-2 point forces class 2; all-zero numerators force class 0
    st = system([("u1", "y1"), ("u2", "y2"), ("u1", "v"), ("v", "y2")])
    d = decide(st, "full-sweep")
    assert d.rank == 2
    assert any(pr.rank == 2 for pr in d.table)
    st0 = system([("a", "b"), ("b", "a")], extra=["a", "b"])
    d0 = decide(st0, "full-sweep")
    assert d0.rank == 0
    assert all(pr.rank == 0 for pr in d0.table)


def test_random_points_never_beat_sweep_rank():
    rng = random.Random(31)
    nodes = ["u1", "u2", "y1", "y2", "v1"]
    pairs = [(a, b) for a in nodes for b in nodes]
    done = 0
    while done < 15:
        edges = [pairs[rng.randrange(len(pairs))] for _ in range(rng.randint(1, 8))]
        st = system(edges, extra=nodes)
        if not 1 <= st.n <= 7:
            continue
        r = decide(st).rank
        for alpha in random_distinct_points(st.n, rng, 20):
            assert rank_at_point(st, alpha).rank <= r
        done += 1


def test_witness_is_first_rank2_point_in_order():
    st = system([("u1", "y1"), ("u2", "y2")])
    full = decide(st, "full-sweep")
    first = next(
        pt for pt, pr in zip(sweep_points(st.n), full.table) if pr.rank == 2
    )
    assert full.witness.values == first.values
    assert decide(st).witness.values == first.values
