import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tmpkit.exact import QuadExt
from tmpkit.formats import generate, generator_atoms, parse_moments, dumps
from tmpkit.moments import BivariateMoments, CurveParams, DegenerateInputError, moments_from_atoms
from tmpkit.symmetric import (
    NotOnCurveError,
    NotSymmetricError,
    RootInterval,
    count_roots,
    cubic_real_roots,
    lift_measure,
    reduce,
    solve_symmetric,
    sturm_sequence,
)
from tmpkit.univariate import LineMeasure


def pairs(curve, xs, ws, degree=6):
    atoms, weights = [], []
    for x, w in zip(xs, ws):
        x = Fraction(x)
        y = QuadExt.sqrt(curve.cubic(x))
        y = y.u if y.is_rational else y
        atoms += [(x, y), (x, -y)]
        weights += [Fraction(w, 2)] * 2
    return atoms, weights, moments_from_atoms(atoms, weights, degree)


def test_cubic_roots_examples():
    r = cubic_real_roots(0, 0)
    assert r.roots == [0] and r.multiplicities == [3]
    assert cubic_real_roots(-1, 0).roots == [-1, 0, 1]
    r = cubic_real_roots(Fraction(-524287, 262144), 1)
    assert r.distinct == 3 and r.discriminant > 0


def test_cubic_roots_quadratic_and_irrational():
    r = cubic_real_roots(-2, 1)  # (x - 1)(x^2 + x - 1)
    assert r.exact and r.distinct == 3
    assert r.roots[2] == 1
    assert r.roots[0] == QuadExt(Fraction(-1, 2), Fraction(-1, 2), 5)
    r = cubic_real_roots(-3, 1)  # irreducible, three real roots
    assert not r.exact and r.distinct == 3
    for iv in r.roots:
        assert isinstance(iv, RootInterval)
        assert iv.hi - iv.lo <= Fraction(1, 2**256)
    assert cubic_real_roots(1, 1).distinct == 1


def test_repeated_roots():
    r = cubic_real_roots(-3, 2)  # (x - 1)^2 (x + 2)
    assert r.roots == [-2, 1] and r.multiplicities == [1, 2]
    r = cubic_real_roots(-3, -2)  # (x + 1)^2 (x - 2): double root on the left
    assert r.roots == [-1, 2] and r.multiplicities == [2, 1]
    _, _, beta = pairs(CurveParams(-3, -2), [3], [1])
    with pytest.raises(DegenerateInputError):
        reduce(beta, CurveParams(-3, -2))


@settings(max_examples=50, deadline=None)
@given(st.integers(-20, 20), st.integers(-20, 20))
def test_sturm_count_matches_discriminant(a, b):
    seq = sturm_sequence([Fraction(b), Fraction(a), Fraction(0), Fraction(1)])
    disc = -4 * a**3 - 27 * b**2
    n = count_roots(seq, Fraction(-10**4), Fraction(10**4))
    assert n == (3 if disc > 0 else 1 if disc < 0 else n)
    assert cubic_real_roots(a, b).distinct == n


def test_reduce_dirac_on_cusp():
    curve = CurveParams(0, 0)
    beta = moments_from_atoms([(Fraction(1), Fraction(1)), (Fraction(1), Fraction(-1))], [Fraction(1, 2)] * 2, 6)
    red = reduce(beta, curve)
    assert red.gamma_tilde == [1] * 10
    assert red.shifted.kind == "halfline"


def test_reduce_rejections():
    curve = CurveParams(-1, 0)
    _, _, beta = pairs(curve, [2], [1])
    vals = dict(beta.values)
    vals[(0, 1)] = Fraction(1)
    with pytest.raises(NotSymmetricError):
        reduce(BivariateMoments(6, vals), curve)
    vals = dict(beta.values)
    vals[(0, 2)] += 1  # breaks beta-hat_30 = beta-hat_01
    with pytest.raises(NotOnCurveError):
        reduce(BivariateMoments(6, vals), curve)


def test_lift_examples():
    curve = CurveParams(-1, 0)
    mu = lift_measure(LineMeasure([Fraction(0)], [Fraction(2)]), Fraction(-1), curve)
    assert mu.atoms == [(-1, 0)] and mu.weights == [2]
    mu = lift_measure(LineMeasure([Fraction(1)], [Fraction(1)]), 0, CurveParams(0, 0))
    assert mu.atoms == [(1, -1), (1, 1)] and mu.weights == [Fraction(1, 2)] * 2


def test_three_root_curve_both_components():
    curve = CurveParams(-1, 0)
    atoms, weights, beta = pairs(curve, [Fraction(-1, 2), 2, 3], [1, 2, 3])
    sol = solve_symmetric(beta, curve)
    assert sol.exists and sol.mode == "exact"
    assert sol.reduction.support.kind == "union"
    xs = {x for x, _ in sol.measure.atoms}
    assert any(x < 0 for x in xs) and any(x > 1 for x in xs)
    assert sol.measure.moments(6) == beta.values


def test_one_root_curve_takes_halfline():
    curve = CurveParams(1, 1)
    _, _, beta = pairs(curve, [0, 1, 3], [1, 1, 2])
    sol = solve_symmetric(beta, curve)
    assert sol.reduction.support.kind == "halfline"
    assert sol.univariate.support.kind == "halfline"
    assert sol.exists and sol.mode == "numeric"
    assert "margins" in sol.univariate.checks
    assert sol.measure.moments(6) == beta.values


def test_dirac_at_smallest_root():
    curve = CurveParams(-1, 0)
    beta = moments_from_atoms([(Fraction(-1), Fraction(0))], [Fraction(1)], 6)
    sol = solve_symmetric(beta, curve)
    assert sol.exists and sol.measure.atoms == [(-1, 0)]


def test_no_measure_when_gap_is_used():
    curve = CurveParams(-1, 0)
    # mass at x = 1/2 would need y^2 < 0
    vals = {}
    for i, j in moments_from_atoms([], [], 6).values:
        vals[(i, j)] = Fraction(0) if j % 2 else Fraction(1, 2) ** i * curve.cubic(Fraction(1, 2)) ** (j // 2)
    sol = solve_symmetric(BivariateMoments(6, vals), curve)
    assert sol.status == "no-measure"


def test_quadratic_field_roots_stay_exact():
    curve = CurveParams(-2, 1)
    _, _, beta = pairs(curve, [-1, 1, 3], [1, 2, 3])
    sol = solve_symmetric(beta, curve)
    assert sol.mode == "exact" and sol.exists
    assert sol.measure.moments(6) == beta.values


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([(-1, 0), (1, 1), (0, 0), (-7, 6)]), st.integers(1, 4))
def test_round_trip_and_support_membership(seed, ab, k):
    curve = CurveParams(*ab)
    obj = generate(curve, 2 * k, seed, symmetric=True)
    beta, _, _ = parse_moments(dumps(obj))
    sol = solve_symmetric(beta, curve)
    assert sol.exists
    assert sol.measure.moments(6) == beta.values
    sup = sol.reduction.support
    for t in sol.univariate.measure.points:
        assert sup.contains(t)
