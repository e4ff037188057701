from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from pfaffseries.series import NonUnitMatrix, Series, det, mat_vec, solve_linear_series


def S(m, trunc, terms):
    return Series(m, trunc, terms)


x1 = Series.variable(1, 2, 4)
x2 = Series.variable(2, 2, 4)
one = Series.constant(1, 2, 4)


def test_add_examples():
    assert (x1 + (-x1)).terms == {}
    a = S(2, 3, {(0, 0): 1, (0, 1): 1})
    b = S(2, 2, {(1, 1): 1})
    assert a + b == S(2, 2, {(0, 0): 1, (0, 1): 1, (1, 1): 1})
    sq = S(2, 4, {(2, 0): 1})
    assert (sq + sq).terms == {(2, 0): 2}


def test_mul_examples():
    a = (one + x1).truncate(3) * (one - x1).truncate(3)
    assert a == S(2, 3, {(0, 0): 1, (2, 0): -1})
    s = (x1 + x2).truncate(2)
    assert (s * s).terms == {(2, 0): 1, (1, 1): 2, (0, 2): 1}
    assert (x1.truncate(1) * x2.truncate(1)) == Series.zero(2, 1)


def test_partial_examples():
    assert S(2, 4, {(2, 1): 1}).partial(1).terms == {(1, 1): 2}
    assert not S(2, 4, {(0, 3): 1}).partial(1)
    f = S(2, 4, {(1, 2): 1})
    assert f.partial(1).partial(2) == f.partial(2).partial(1)
    assert f.partial(1).partial(2).terms == {(0, 1): 2}


def test_mul_axis_power_examples():
    a = S(2, 3, {(0, 0): 1, (0, 1): 1}).mul_axis_power(1, 2)
    assert a == S(2, 5, {(2, 0): 1, (2, 1): 1})
    assert x1.mul_axis_power(1, 0) == x1
    assert x1.mul_axis_power(1, 1).terms == {(2, 0): 1}


def test_ord_axis_examples():
    import math
    assert S(2, 4, {(2, 1): 1, (3, 0): 1}).ord_axis(1) == 2
    assert x2.ord_axis(1) == 0
    assert Series.zero(2, 3).ord_axis(1) == math.inf


def test_restrict_axis_examples():
    a = S(2, 3, {(0, 0): 1, (1, 0): 1, (0, 1): 1, (1, 1): 1})
    assert a.restrict_axis(1).terms == {(0, 0): 1, (0, 1): 1}
    assert not S(2, 3, {(2, 0): 1}).restrict_axis(1)
    assert S(2, 3, {(0, 3): 1}).restrict_axis(1).terms == {(0, 3): 1}


def test_det_examples():
    assert det([[one + x1, x2], [Series.zero(2, 4), one]]) == one + x1
    z = Series.zero(2, 4)
    assert det([[one, z, z], [z, one, z], [z, z, one]]) == one
    m = [[x1.truncate(2), x2.truncate(2)], [x2.truncate(2), x1.truncate(2)]]
    assert det(m).terms == {(2, 0): 1, (0, 2): -1}


def test_solve_linear_series_examples():
    z = Series.zero(2, 3)
    o = Series.constant(1, 2, 3)
    r = [S(2, 3, {(1, 2): 5}), S(2, 3, {(0, 1): -1})]
    assert solve_linear_series([[o, z], [z, o]], r) == r
    geo = solve_linear_series([[o + Series.variable(2, 2, 3)]], [o])
    assert geo[0].terms == {(0, 0): 1, (0, 1): -1, (0, 2): 1, (0, 3): -1}
    two = Series.constant(2, 2, 3)
    out = solve_linear_series([[two, z], [z, o]], [Series.variable(2, 2, 3), S(2, 3, {(0, 2): 1})])
    assert out[0].terms == {(0, 1): Fraction(1, 2)} and out[1].terms == {(0, 2): 1}


def test_solve_linear_series_rejects_singular_constant_part():
    with pytest.raises(NonUnitMatrix):
        solve_linear_series([[x1]], [one])


def test_inverse_needs_unit():
    with pytest.raises(ZeroDivisionError):
        x1.inverse()


def test_to_text_orders_by_degree():
    a = S(2, 3, {(0, 1): -1, (1, 0): -1, (1, 1): Fraction(3, 2)})
    assert a.to_text() == "-x1 - x2 + 3/2*x1*x2"


# -- properties ---------------------------------------------------------------

M = 2
TRUNC = 4
coeff = st.fractions(min_value=-3, max_value=3, max_denominator=4)
index = st.tuples(*[st.integers(0, TRUNC)] * M).filter(lambda k: sum(k) <= TRUNC)


@st.composite
def series(draw, trunc=TRUNC):
    t = draw(st.integers(0, trunc))
    terms = draw(st.dictionaries(index, coeff, max_size=6))
    return Series(M, t, {k: v for k, v in terms.items() if sum(k) <= t})


@given(series(), series(), series())
def test_ring_axioms(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c


@given(series(), series(), st.integers(1, M))
def test_product_rule(a, b, axis):
    t = min(a.trunc, b.trunc)
    if t < 1:
        return
    lhs = (a * b).partial(axis)
    rhs = a.partial(axis) * b.truncate(t - 1) + a.truncate(t - 1) * b.partial(axis)
    assert lhs == rhs.truncate(t - 1)


@given(series())
def test_partials_commute(a):
    if a.trunc < 2:
        return
    assert a.partial(1).partial(2) == a.partial(2).partial(1)


@given(series(), series())
def test_restrict_is_ring_morphism(a, b):
    assert (a * b).restrict_axis(1) == a.restrict_axis(1) * b.restrict_axis(1)
    assert (a + b).restrict_axis(1) == a.restrict_axis(1) + b.restrict_axis(1)


@given(series(), series())
def test_ord_of_product_is_additive(a, b):
    t = min(a.trunc, b.trunc)
    a, b = a.truncate(t), b.truncate(t)
    p = a * b
    if p:
        assert p.ord_axis(1) >= a.ord_axis(1) + b.ord_axis(1)


@given(series())
def test_inverse_property(a):
    a = a + Series.constant(1 - a.constant_term() + 2, M, a.trunc)
    assert a * a.inverse() == Series.constant(1, M, a.trunc)


def _at(t, a):
    return Series(M, t, {k: v for k, v in a.terms.items() if sum(k) <= t})


@given(st.lists(series(), min_size=4, max_size=4), st.lists(series(), min_size=2, max_size=2))
def test_solve_linear_series_residual(entries, rhs):
    t = 3
    a, b, c, d = (_at(t, e) for e in entries)
    Mx = [[a + 3, b], [c, d - 3]]
    A0 = [[e.constant_term() for e in row] for row in Mx]
    if A0[0][0] * A0[1][1] == A0[0][1] * A0[1][0]:
        return
    r = [_at(t, v) for v in rhs]
    x = solve_linear_series(Mx, r)
    assert mat_vec(Mx, x) == r
