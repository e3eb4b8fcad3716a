import itertools

from hypothesis import given, settings
from hypothesis import strategies as st

from twopaths.poly import ONE, TruncPoly2, UniPoly, det2x2, s_minus


def test_product_of_linears():
    assert s_minus(2) * s_minus(4) == UniPoly((8, -6, 1))


def test_mul_by_zero_annihilates():
    p = UniPoly((3, 0, 7))
    assert p * UniPoly() == UniPoly()
    assert (p * UniPoly()).is_zero()


def test_loop_determinant_expansion():
    # (s-2)(s-4) - 1, reused by the gain-formula tests
    assert s_minus(2) * s_minus(4) - ONE == UniPoly((7, -6, 1))


def test_trailing_zeros_stripped():
    assert UniPoly((1, 2, 0, 0)) == UniPoly((1, 2))
    assert UniPoly((0,)).is_zero()
    assert UniPoly((1, 2)).degree == 1
    assert UniPoly().degree == -1


def test_divexact():
    num = s_minus(2) * s_minus(4) * s_minus(7)
    assert num.divexact(s_minus(4)) == s_minus(2) * s_minus(7)


def test_divexact_rejects_inexact():
    import pytest

    with pytest.raises(ArithmeticError):
        (s_minus(2) * s_minus(4) + ONE).divexact(s_minus(2))


def test_det2x2():
    m = ((s_minus(4), UniPoly()), (UniPoly(), s_minus(2)))
    assert det2x2(m) == UniPoly((8, -6, 1))
    zero_row = ((UniPoly(), UniPoly()), (s_minus(1), s_minus(2)))
    assert det2x2(zero_row).is_zero()
    same = ((ONE, ONE), (ONE, ONE))
    assert det2x2(same).is_zero()


small_polys = st.lists(st.integers(-9, 9), max_size=5).map(lambda c: UniPoly(tuple(c)))


@given(small_polys, small_polys, small_polys)
@settings(max_examples=200, deadline=None)
def test_unipoly_ring_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + b == b + a
    assert a * b == b * a


@given(small_polys, small_polys, st.integers(-20, 20))
@settings(max_examples=200, deadline=None)
def test_evaluation_homomorphism(a, b, x):
    assert (a * b).evaluate(x) == a.evaluate(x) * b.evaluate(x)
    assert (a + b).evaluate(x) == a.evaluate(x) + b.evaluate(x)


# --- degree-2 truncated multivariate ---------------------------------------


def test_trunc2_products():
    z1, z2 = TruncPoly2.var(1), TruncPoly2.var(2)
    one = TruncPoly2.const(1)
    assert (one + z1) * (one + z2) == TruncPoly2(
        1, {1: 1, 2: 1}, {(1, 2): 1}
    )
    assert z1 * z1 == TruncPoly2(quadratic={(1, 1): 1})
    # (z1 + z2)^2 expands by hand to z1^2 + 2 z1 z2 + z2^2
    s = z1 + z2
    assert s * s == TruncPoly2(quadratic={(1, 1): 1, (1, 2): 2, (2, 2): 1})


def test_trunc2_symmetric_key_storage():
    z1, z2 = TruncPoly2.var(1), TruncPoly2.var(2)
    assert z1 * z2 == z2 * z1
    assert (z2 * z1).quadratic == {(1, 2): 1}


def _naive_full_mul(a_terms, b_terms):
    """Oracle: full multivariate product on exponent-tuple dicts."""
    out = {}
    for ea, ca in a_terms.items():
        for eb, cb in b_terms.items():
            key = tuple(x + y for x, y in zip(ea, eb))
            out[key] = out.get(key, 0) + ca * cb
    return {e: c for e, c in out.items() if c}


def _to_terms(p: TruncPoly2, nvars: int):
    terms = {}
    zero = (0,) * nvars
    if p.constant:
        terms[zero] = p.constant
    for i, c in p.linear.items():
        e = list(zero)
        e[i - 1] = 1
        terms[tuple(e)] = c
    for (i, j), c in p.quadratic.items():
        e = list(zero)
        e[i - 1] += 1
        e[j - 1] += 1
        terms[tuple(e)] = c
    return terms


def _truncate(terms, limit=2):
    return {e: c for e, c in terms.items() if sum(e) <= limit}


sparse_tp2 = st.builds(
    TruncPoly2,
    st.integers(-5, 5),
    st.dictionaries(st.integers(1, 6), st.integers(-5, 5).filter(bool), max_size=3),
    st.dictionaries(
        st.tuples(st.integers(1, 6), st.integers(1, 6)).map(lambda t: (min(t), max(t))),
        st.integers(-5, 5).filter(bool),
        max_size=3,
    ),
)


@given(sparse_tp2, sparse_tp2)
@settings(max_examples=300, deadline=None)
def test_trunc2_mul_matches_naive_truncated_product(a, b):
    got = a * b
    expected = _truncate(_naive_full_mul(_to_terms(a, 6), _to_terms(b, 6)))
    assert _to_terms(got, 6) == expected


@given(sparse_tp2, sparse_tp2, sparse_tp2)
@settings(max_examples=150, deadline=None)
def test_trunc2_distributivity(a, b, c):
    assert a * (b + c) == a * b + a * c


@given(sparse_tp2, sparse_tp2, st.lists(st.integers(-4, 4), min_size=6, max_size=6))
@settings(max_examples=150, deadline=None)
def test_trunc2_add_evaluation(a, b, values):
    env = {i + 1: v for i, v in enumerate(values)}
    assert (a + b).evaluate(env) == a.evaluate(env) + b.evaluate(env)
    total = (a + b) - b
    assert total == a
    assert all(total.linear.values()) and all(total.quadratic.values())
