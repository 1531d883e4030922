from fractions import Fraction

import pytest

from tmpkit import linalg
from tmpkit.exact import QuadExt
from tmpkit.flat_ext import (
    RThetaPoly,
    build_flat_extension,
    compress,
    compute_R,
    evaluate_R_direct,
    flat_extensions,
    solve_R,
)
from tmpkit.moments import CurveParams, build_moment_matrix, moments_from_atoms

from conftest import cusp_measure

A46 = 12139086586077884004193854007024034872245209422802987219
B46 = 12139063422162694789011422592242810880000000000000000000
C46 = 90641965446620657513025511098298018324395010735907478615575494656 * 10**36

R2_1150_PRINTED = Fraction(
    2518293870123022495609405302939763563092225775041011300,
    121617394571298435190879906936561845321520470769,
)
R0_1150 = Fraction(1850617701610280004960481, 11427409289822154604482953216000)


def _cd(beta, curve):
    return compress(build_moment_matrix(beta), beta, curve)


def _interpolate(xs, ys):
    """Coefficients (low first) of the polynomial through the points, by Lagrange."""
    n = len(xs)
    coeffs = [Fraction(0)] * n
    for i in range(n):
        basis, den = [Fraction(1)], Fraction(1)
        for j in range(n):
            if j != i:
                basis = [Fraction(0)] + basis
                for k in range(len(basis) - 1):
                    basis[k] -= xs[j] * basis[k + 1]
                den *= xs[i] - xs[j]
        for k in range(n):
            coeffs[k] += ys[i] * basis[k] / den
    return coeffs


def test_compression_sizes_and_epsilon(fixtures):
    beta, curve, _ = fixtures["example-1046"]
    cd = _cd(beta, curve)
    assert (len(cd.w), len(cd.q), len(cd.p)) == (8, 7, 6)
    assert cd.eps > 0


def test_recursive_moments_of_1150_match_atoms(fixtures):
    beta, curve, _ = fixtures["example-1150"]
    atoms = []
    for k in range(1, 6):
        x = Fraction(1, k)
        y = QuadExt.sqrt(curve.cubic(x))
        atoms += [(x, y), (x, -y)]
    direct = moments_from_atoms(atoms, [Fraction(1)] * 10, 7)
    assert all(direct[ij] == beta[ij] for ij in beta.values)
    rec = _cd(beta, curve).recursive_moments
    assert rec
    for ij, val in rec.items():
        assert val == direct[ij], ij


def test_R_of_1150(fixtures):
    beta, curve, _ = fixtures["example-1150"]
    R = compute_R(_cd(beta, curve))
    assert R.R1 == 0
    assert R.R0 == R0_1150
    # the printed leading coefficient is 100 times this value
    assert R.R2 * 100 == R2_1150_PRINTED
    assert solve_R(R).kind == "no-root"


def test_R_of_1150_agrees_with_brute_force(fixtures):
    beta, curve, _ = fixtures["example-1150"]
    cd = _cd(beta, curve)
    R = compute_R(cd)
    xs = [Fraction(t) for t in range(-2, 3)]
    coeffs = _interpolate(xs, [evaluate_R_direct(cd, x) for x in xs])
    assert coeffs[4] == 0 and coeffs[3] == 0
    assert coeffs[:3] == [R.R0, R.R1, R.R2]


def test_R_of_2031(fixtures):
    beta, curve, _ = fixtures["example-2031"]
    R = compute_R(_cd(beta, curve))
    assert (R.R2, R.R1, R.R0) == (0, 0, -16257024)
    assert solve_R(R).kind == "no-root"


def test_R_of_1046(fixtures):
    beta, curve, _ = fixtures["example-1046"]
    cd = _cd(beta, curve)
    R = compute_R(cd)
    theta = Fraction(7, 3)
    assert R(theta) == -((A46 - B46 * theta) ** 2) / Fraction(C46)
    assert (R.R2, R.R1, R.R0) == (
        -Fraction(B46 * B46, C46),
        Fraction(2 * A46 * B46, C46),
        -Fraction(A46 * A46, C46),
    )
    roots = solve_R(R)
    assert roots.kind == "double"
    assert roots.roots[0] == Fraction(A46, B46)
    fe = build_flat_extension(cd, roots.roots[0])
    assert fe.multiplicity == "unique"
    assert fe.Mn1.dim == 15
    assert linalg.rank(fe.Mn1) == 9
    assert linalg.is_psd(fe.Mn1)


@pytest.mark.parametrize(
    "coeffs, kind",
    [
        ((-2, 0, 1), "two"),
        ((1, 0, 1), "no-root"),
        ((1, -2, 1), "double"),
        ((3, 2, 0), "single"),
        ((0, 0, 0), "identically-zero"),
        ((5, 0, 0), "no-root"),
    ],
)
def test_solve_R_cases(coeffs, kind):
    R0, R1, R2 = (Fraction(c) for c in coeffs)
    roots = solve_R(RThetaPoly(R2, R1, R0, R1 * R1 - 4 * R0 * R2))
    assert roots.kind == kind
    for t in roots.roots:
        assert (R2 * t + R1) * t + R0 == 0


def test_sqrt2_roots_live_in_the_quadratic_field():
    roots = solve_R(RThetaPoly(Fraction(1), Fraction(0), Fraction(-2), Fraction(8)))
    lo, hi = roots.roots
    assert lo == -QuadExt.sqrt(2) and hi == QuadExt.sqrt(2)
    assert roots.branches == ("minus", "plus")


@pytest.mark.parametrize("seed", range(6))
def test_true_moment_is_a_root_and_extension_is_flat(seed):
    atoms, weights, beta = cusp_measure(seed)
    curve = CurveParams(0, 0)
    cd = _cd(beta, curve)
    R = compute_R(cd)
    true = moments_from_atoms(atoms, weights, 7)
    theta = true[(2, 5)]
    assert R(theta) == 0
    assert evaluate_R_direct(cd, theta) == 0
    fes = flat_extensions(cd, solve_R(R))
    assert any(fe.theta == theta for fe in fes)
    for fe in fes:
        assert linalg.rank(fe.Mn1) == 9
        assert all(fe.checks.values())
    fe = next(fe for fe in fes if fe.theta == theta)
    assert fe.phi == true[(1, 6)] and fe.psi == true[(0, 7)]
