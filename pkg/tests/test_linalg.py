import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tmpkit import linalg
from tmpkit.exact import QuadExt
from tmpkit.linalg import SymMatrix
from tmpkit.moments import build_moment_matrix


def sym(rows):
    return SymMatrix.from_rows(rows)


def rand_matrix(rng, r, c, lo=-5, hi=5):
    return [[Fraction(rng.randint(lo, hi), rng.randint(1, 4)) for _ in range(c)] for _ in range(r)]


def test_rank_examples(fixtures):
    assert linalg.rank([[0] * 3] * 3) == 0
    assert linalg.rank(linalg.identity(4)) == 4
    beta, _, _ = fixtures["example-1150"]
    assert linalg.rank(build_moment_matrix(beta)) == 9


def test_psd_examples(fixtures):
    assert linalg.is_psd(sym([[1, 0, 0], [0, 0, 0], [0, 0, 2]]))
    assert not linalg.is_psd(sym([[0, 1], [1, 0]]))
    beta, _, _ = fixtures["example-2031"]
    assert linalg.is_psd(build_moment_matrix(beta))


def test_invert_examples(fixtures):
    assert linalg.invert(linalg.identity(3)) == linalg.identity(3)
    assert linalg.invert([[2, 1], [1, 1]]) == [[1, -1], [-1, 2]]
    with pytest.raises(linalg.SingularMatrixError):
        linalg.invert([[1, 1], [1, 1]])


def test_invert_basis_compression_of_1046(fixtures):
    from tmpkit.moments import basis_B, monomials

    beta, _, _ = fixtures["example-1046"]
    M = build_moment_matrix(beta)
    idx = [monomials(3).index(m) for m in basis_B(3)]
    MB = M.submatrix(idx)
    inv = linalg.invert(MB)
    assert linalg.matmul(MB.rows(), inv) == linalg.identity(9)


def test_column_space(fixtures):
    assert linalg.in_column_space(sym([[1, 0], [0, 0]]), [5, 0])
    assert not linalg.in_column_space(sym([[1, 0], [0, 0]]), [0, 1])
    beta, _, _ = fixtures["example-1150"]
    M = build_moment_matrix(beta)
    assert all(linalg.in_column_space(M, M.column(j)) for j in range(M.dim))


def test_quadratic_field_entries():
    r = QuadExt.sqrt(2)
    M = [[1, r], [r, 2]]
    assert linalg.rank(M) == 1
    assert linalg.is_psd(sym(M))
    assert not linalg.is_pd(sym(M))
    assert not linalg.is_psd(sym([[1, r], [r, Fraction(199, 100)]]))


def test_numeric_entries_need_tolerance():
    import mpmath

    M = [[mpmath.mpf(1), mpmath.mpf(2)], [mpmath.mpf(2), mpmath.mpf(4)]]
    assert linalg.rank(M, tol=mpmath.mpf("1e-30")) == 1


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 12))
def test_rank_invariant_under_permutation(seed, n):
    rng = random.Random(seed)
    k = rng.randint(1, n)
    G = rand_matrix(rng, k, n)
    A = linalg.matmul(linalg.transpose(G), G)
    perm = list(range(n))
    rng.shuffle(perm)
    PA = [[A[perm[i]][perm[j]] for j in range(n)] for i in range(n)]
    assert linalg.rank(A) == linalg.rank(PA) == linalg.rank(G)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10**6))
def test_gram_matrices_are_psd(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 7)
    G = rand_matrix(rng, rng.randint(1, n + 2), n)
    A = sym(linalg.matmul(linalg.transpose(G), G))
    assert linalg.is_psd(A)
    for i in range(n):
        for j in range(i):
            assert A[i, i] * A[j, j] - A[i, j] ** 2 >= 0


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_double_inverse_is_identity(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 6)
    A = rand_matrix(rng, n, n)
    if linalg.rank(A) < n:
        return
    assert linalg.invert(linalg.invert(A)) == A


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_nullspace_and_solve(seed):
    rng = random.Random(seed)
    n = rng.randint(2, 6)
    G = rand_matrix(rng, rng.randint(1, n - 1), n)
    A = linalg.matmul(linalg.transpose(G), G)
    ker = linalg.nullspace(A)
    assert len(ker) == n - linalg.rank(A)
    for v in ker:
        assert all(x == 0 for x in linalg.matvec(A, v))
    b = linalg.matvec(A, [Fraction(rng.randint(-3, 3)) for _ in range(n)])
    x = linalg.column_space_solution(A, b)
    assert linalg.matvec(A, x) == b
