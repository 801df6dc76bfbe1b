from fractions import Fraction
from math import isqrt

import pytest
from hypothesis import given, strategies as st

from barrierpaths.barrier import (
    BarrierSpecError,
    Constant,
    Explicit,
    Linear,
    LinearSqrt,
    format_barrier_spec,
    growth_rate,
    parse_barrier_spec,
    prefix,
)


@pytest.mark.parametrize(
    "text, expected",
    [
        ("linear:r=1,s=0", Linear(1, 0)),
        ("list:0,2,2,5;ext=last", Explicit((0, 2, 2, 5), "last")),
        ("list:0,2,2,5", Explicit((0, 2, 2, 5), "last")),
        ("const:s=7", Constant(7)),
        ("list:1,3;ext=linear(2)", Explicit((1, 3), "linear", 2)),
        ("linsqrt:theta=1/2,c=5", LinearSqrt(Fraction(1, 2), 5)),
    ],
)
def test_parse(text, expected):
    assert parse_barrier_spec(text) == expected


def test_decreasing_list_is_semantic_error():
    with pytest.raises(BarrierSpecError, match="barrier not nondecreasing at index 1") as e:
        parse_barrier_spec("list:3,1;ext=last")
    assert e.value.position is None


@pytest.mark.parametrize(
    "text, pos",
    [
        ("linear:r=1;s=0", 10),
        ("linear:r=-1,s=0", 9),
        ("const:s=", 8),
        ("cubic:x=1", 0),
        ("list:1,2,", 9),
        ("list:1,2;ext=first", 13),
        ("const:s=1 ", 9),
        ("linsqrt:theta=1/0,c=2", 16),
        ("list:1;ext=linear(2", 19),
    ],
)
def test_syntax_errors_carry_position(text, pos):
    with pytest.raises(BarrierSpecError) as e:
        parse_barrier_spec(text)
    assert e.value.position == pos


def test_ext_on_non_list_rejected():
    with pytest.raises(BarrierSpecError, match="only applies to list"):
        parse_barrier_spec("const:s=1;ext=last")
    with pytest.raises(BarrierSpecError, match="duplicate"):
        parse_barrier_spec("list:1;ext=last;ext=last")


def test_negative_parameters_rejected_by_constructors():
    with pytest.raises(BarrierSpecError):
        Linear(-1, 0)
    with pytest.raises(BarrierSpecError):
        LinearSqrt(Fraction(-1, 2), 0)
    with pytest.raises(BarrierSpecError):
        Explicit((0, -1))


def test_eval_examples():
    assert Linear(2, 3).eval(4) == 11
    assert Explicit((0, 2, 2, 5), "last").eval(10) == 5
    assert LinearSqrt(Fraction(1), 2).eval(9) == 15


def test_prefix_examples():
    assert prefix(Linear(1, 0), 4) == [0, 1, 2, 3]
    assert prefix(Constant(0), 3) == [0, 0, 0]
    assert prefix(Explicit((1, 3), "linear", 2), 4) == [1, 3, 5, 7]


def test_growth_rate_examples():
    assert growth_rate(Constant(7)).value == 0
    assert growth_rate(Linear(3, 1)).value == 3
    assert growth_rate(LinearSqrt(Fraction(1, 2), 5)).value == Fraction(1, 2)
    assert growth_rate(Explicit((1, 4), "last")).value == 0
    assert growth_rate(Explicit((1, 4), "linear", 3)).value == 3


def _linsqrt_oracle(num, den, c, n):
    # floor((num*n)/den + c*sqrt(n)) checked against integer bracketing
    v = LinearSqrt(Fraction(num, den), c).eval(n)
    # v <= x < v+1  <=>  den*v - num*n <= den*c*sqrt(n) < den*(v+1) - num*n
    lo, hi = den * v - num * n, den * (v + 1) - num * n
    rhs_sq = den * den * c * c * n
    ok_lo = lo <= 0 or lo * lo <= rhs_sq
    ok_hi = hi > 0 and hi * hi > rhs_sq
    return ok_lo and ok_hi


@given(st.integers(0, 50), st.integers(1, 50), st.integers(0, 20), st.integers(0, 10**6))
def test_linsqrt_floor_is_exact(num, den, c, n):
    assert _linsqrt_oracle(num, den, c, n)


barriers = st.one_of(
    st.builds(Constant, st.integers(0, 20)),
    st.builds(Linear, st.integers(0, 5), st.integers(0, 20)),
    st.builds(
        LinearSqrt,
        st.builds(Fraction, st.integers(0, 9), st.integers(1, 9)),
        st.integers(0, 9),
    ),
    st.lists(st.integers(0, 6), min_size=1, max_size=8).flatmap(
        lambda xs: st.builds(
            lambda vals, step, lin: Explicit(vals, "linear" if lin else "last", step if lin else 0),
            st.just(tuple(sorted(xs))),
            st.integers(0, 4),
            st.booleans(),
        )
    ),
)


@given(barriers)
def test_parse_format_round_trip(b):
    assert parse_barrier_spec(format_barrier_spec(b)) == b


@given(barriers)
def test_monotone_and_nonnegative_on_window(b):
    vals = b.prefix(10**4 + 1)
    assert vals[0] >= 0
    assert all(x <= y for x, y in zip(vals, vals[1:]))


@pytest.mark.parametrize(
    "b, slack",
    [
        (Linear(3, 7), 1),
        (LinearSqrt(Fraction(7, 3), 1), 1),
        (LinearSqrt(Fraction(1, 2), 0), 1),
        # the sqrt term contributes c/sqrt(n) on its own
        (LinearSqrt(Fraction(1, 2), 5), 6),
    ],
)
def test_growth_consistency(b, slack):
    n = 10**4
    theta = b.growth_rate().value
    assert abs(Fraction(b.eval(n), n) - theta) <= Fraction(slack, isqrt(n))


def test_barrier_is_hashable_and_immutable():
    b = Linear(1, 2)
    assert hash(b) == hash(Linear(1, 2))
    with pytest.raises(Exception):
        b.r = 5
