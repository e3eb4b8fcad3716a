import random

import pytest

from twopaths.errors import CapExceeded
from twopaths.graph import build_system, digraph, standardize
from twopaths.mason import (
    check_determinant_factorization,
    cleared_determinant,
    enumerate_loops,
    loop_clusters,
    transfer_gain,
)
from twopaths.poly import ONE, UniPoly, product, s_minus
from twopaths.resolvent import faddeev

U = ("u1", "u2")
Y = ("y1", "y2")


def sfg_system(edges, extra=()):
    return build_system(standardize(digraph(edges, U, Y, extra_nodes=extra)))


def base_point(n):
    return tuple(n * i for i in range(1, n + 1))


def test_two_branch_loop():
    sfg, _ = sfg_system([("a", "b"), ("b", "a")])
    loops = enumerate_loops(sfg)
    assert len(loops) == 1
    assert set(loops[0].branches) == {1, 2}
    assert loops[0].nodes == frozenset({"a", "b"})


def test_dag_has_no_loops():
    sfg, _ = sfg_system([("u1", "a"), ("a", "y1"), ("a", "y2"), ("u2", "a")])
    assert enumerate_loops(sfg) == []


def test_two_loops_sharing_a_node():
    sfg, _ = sfg_system([("a", "b"), ("b", "a"), ("b", "c"), ("c", "b")])
    loops = enumerate_loops(sfg)
    assert len(loops) == 2


def test_loop_cap():
    # complete digraph on 5 interior nodes has dozens of cycles
    nodes = ["a", "b", "c", "d", "e"]
    edges = [(x, y) for x in nodes for y in nodes if x != y]
    sfg, _ = sfg_system(edges)
    with pytest.raises(CapExceeded):
        enumerate_loops(sfg, cap=10)


def test_cleared_determinant_single_loop():
    sfg, _ = sfg_system([("a", "b"), ("b", "a")])
    loops = enumerate_loops(sfg)
    assert cleared_determinant(sfg, loops, (2, 4)) == UniPoly((7, -6, 1))


def test_cleared_determinant_disjoint_loops_factor():
    sfg, _ = sfg_system([("a", "b"), ("b", "a"), ("c", "d"), ("d", "c")])
    loops = enumerate_loops(sfg)
    got = cleared_determinant(sfg, loops, (2, 4, 6, 8))
    expected = (s_minus(2) * s_minus(4) - ONE) * (s_minus(6) * s_minus(8) - ONE)
    assert got == expected


def test_cleared_determinant_dag_is_primary_product():
    sfg, st = sfg_system([("u1", "a"), ("a", "y1")])
    alpha = (3, 7)
    assert cleared_determinant(sfg, [], alpha) == product(map(s_minus, alpha))


def test_transfer_gain_simple_path():
    sfg, _ = sfg_system([("u1", "a"), ("a", "y1")])
    num, den = transfer_gain(sfg, (2, 4), 1, 1)
    assert num == ONE
    assert den == s_minus(2) * s_minus(4)


def test_transfer_gain_no_path():
    sfg, _ = sfg_system([("u1", "a"), ("a", "y1")])
    num, den = transfer_gain(sfg, (2, 4), 2, 2)
    assert num.is_zero()


def test_transfer_gain_cofactor_removes_touching_loop():
    # path u1 -> a -> y1 with a loop a -> b -> a touching the path at a:
    # the path's cofactor drops the loop, so the cleared numerator is the
    # product of the primary factors of the two off-path branches
    sfg, st = sfg_system([("u1", "a"), ("a", "y1"), ("a", "b"), ("b", "a")])
    alpha = (2, 4, 6, 8)
    num, den = transfer_gain(sfg, alpha, 1, 1)
    by_pair = {(b.tail, b.head): b.index for b in sfg.branches}
    off_path = [by_pair[("a", "b")], by_pair[("b", "a")]]
    assert num == product(s_minus(alpha[i - 1]) for i in off_path)
    res = faddeev(st, alpha)
    assert den == res.charpoly
    assert num * res.charpoly == res.numerator[0][0] * den


def test_charpoly_identity_on_loop_fixtures():
    fixtures = [
        [("a", "b"), ("b", "a"), ("u1", "a"), ("b", "y1")],
        [("a", "b"), ("b", "a"), ("b", "c"), ("c", "b"), ("u1", "a"), ("c", "y2")],
        [("a", "b"), ("b", "c"), ("c", "a"), ("u2", "a"), ("c", "y1"), ("u1", "y2")],
    ]
    for edges in fixtures:
        sfg, st = sfg_system(edges)
        alpha = base_point(st.n)
        loops = enumerate_loops(sfg)
        assert cleared_determinant(sfg, loops, alpha) == faddeev(st, alpha).charpoly


def test_transfer_identity_cross_multiplied():
    fixtures = [
        [("u1", "a"), ("a", "y1"), ("u2", "a"), ("a", "y2")],
        [("u1", "a"), ("a", "b"), ("b", "a"), ("b", "y1"), ("u2", "y2")],
        [("u1", "y2"), ("u2", "y1"), ("u2", "a"), ("a", "a")],
    ]
    for edges in fixtures:
        sfg, st = sfg_system(edges)
        alpha = base_point(st.n)
        res = faddeev(st, alpha)
        for i in (1, 2):
            for j in (1, 2):
                num, den = transfer_gain(sfg, alpha, i, j)
                lhs = num * res.charpoly
                rhs = res.numerator[j - 1][i - 1] * den
                assert lhs == rhs, (edges, i, j)


def test_loop_clusters():
    sfg, _ = sfg_system([("a", "b"), ("b", "a"), ("c", "d"), ("d", "c")])
    assert len(loop_clusters(sfg)) == 2
    sfg8, _ = sfg_system([("a", "b"), ("b", "a"), ("b", "c"), ("c", "b")])
    assert len(loop_clusters(sfg8)) == 1
    dag, _ = sfg_system([("u1", "a"), ("a", "y1")])
    assert loop_clusters(dag) == []


def test_factorization_fixtures():
    for edges in (
        [("a", "b"), ("b", "a"), ("c", "d"), ("d", "c")],
        [("a", "b"), ("b", "a"), ("b", "c"), ("c", "b")],
        [("u1", "a"), ("a", "y1")],
    ):
        sfg, st = sfg_system(edges)
        assert check_determinant_factorization(sfg, base_point(st.n))


def test_factorization_on_random_graphs():
    rng = random.Random(404)
    nodes = ["u1", "u2", "y1", "y2", "v1", "v2", "v3"]
    pairs = [(a, b) for a in nodes for b in nodes]
    done = 0
    while done < 60:
        edges = [pairs[rng.randrange(len(pairs))] for _ in range(rng.randint(1, 10))]
        sfg, st = sfg_system(edges, extra=nodes)
        if not 1 <= st.n <= 10:
            continue
        assert check_determinant_factorization(sfg, base_point(st.n))
        done += 1
