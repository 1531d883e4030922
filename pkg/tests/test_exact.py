from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tmpkit.exact import QuadExt, exact_sum, format_rational, parse_rational, rational_sqrt, sign

rationals = st.fractions(min_value=-10**6, max_value=10**6, max_denominator=10**4)
radicands = st.sampled_from([2, 3, 5, 7, Fraction(2, 3), 11])


@st.composite
def quads(draw, d=None):
    return QuadExt(draw(rationals), draw(rationals), draw(radicands) if d is None else d)


@pytest.mark.parametrize(
    "u, v, d, expected",
    [(0, 0, 2, 0), (3, -2, 2, 1), (-1, 1, 2, 1), (1, -1, 2, -1), (-3, 2, 2, -1), (5, 0, 7, 1)],
)
def test_sign_examples(u, v, d, expected):
    assert QuadExt(u, v, d).sign() == expected


def test_rational_sqrt():
    assert rational_sqrt(0) == 0
    assert rational_sqrt(Fraction(9, 4)) == Fraction(3, 2)
    assert rational_sqrt(2) is None
    with pytest.raises(ValueError):
        rational_sqrt(-4)


def test_parse_and_format_round_trip():
    big = "2518293870123022495609405302939763563092225775041011300/121617394571298435190879906936561845321520470769"
    assert format_rational(parse_rational(big)) == big
    assert parse_rational(" -6/4 ") == Fraction(-3, 2)
    assert format_rational(Fraction(4, 2)) == "2"
    with pytest.raises(ValueError):
        parse_rational("1.5e3x")


def test_sqrt_of_square_is_rational():
    r = QuadExt.sqrt(Fraction(9, 4))
    assert r.is_rational and r.u == Fraction(3, 2)
    s = QuadExt.sqrt(2)
    assert s * s == 2


@given(rationals, rationals, rationals)
def test_field_axioms_rational(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c


@given(quads(d=3), quads(d=3), quads(d=3))
def test_field_axioms_quad(x, y, z):
    assert (x + y) + z == x + (y + z)
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    if x != 0:
        assert x * x.inverse() == 1


@given(quads())
def test_sign_antisymmetric_and_squares_nonnegative(x):
    assert sign(x) == -sign(-x)
    assert sign(x * x) >= 0


@settings(max_examples=1000)
@given(quads())
def test_sign_matches_200_bit_evaluation(x):
    ctx = mpmath.ctx_mp.MPContext()
    ctx.prec = 200
    val = x.to_mpf(ctx)
    if abs(val) > ctx.mpf(2) ** -100:
        assert sign(x) == (1 if val > 0 else -1)


def test_json_round_trip():
    x = QuadExt(Fraction(-1, 2), Fraction(3, 7), 5)
    assert QuadExt.from_json(x.to_json()) == x


def test_exact_sum_cancels_across_radicands():
    r2, r3 = QuadExt.sqrt(2), QuadExt.sqrt(3)
    assert exact_sum([r2, -r2, r3, -r3, Fraction(1, 3)]) == Fraction(1, 3)
    assert exact_sum([r2, r2, 1]) == QuadExt(1, 2, 2)
    with pytest.raises(ValueError):
        exact_sum([r2, r3])
