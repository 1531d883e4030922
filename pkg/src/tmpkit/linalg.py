"""Dense exact linear algebra over Q and Q(sqrt D).

Matrices are plain row lists or :class:`SymMatrix`.  Over Q the rank is
computed with Bareiss fraction-free elimination on an integer matrix; over
Q(sqrt D) ordinary elimination is used since division is cheap there.

The same routines accept ``mpmath.mpf`` entries when a tolerance is given,
which is how the numeric fallback of the symmetric solver runs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .exact import QuadExt, sign as exact_sign


class SingularMatrixError(ValueError):
    pass


@dataclass(frozen=True)
class SymMatrix:
    """Symmetric matrix with one label per row/column."""

    entries: tuple
    labels: tuple

    def __post_init__(self):
        n = len(self.entries)
        if any(len(row) != n for row in self.entries):
            raise ValueError("SymMatrix must be square")
        if len(self.labels) != n:
            raise ValueError("labels length must equal the dimension")

    @classmethod
    def from_rows(cls, rows, labels=None, check: bool = True) -> "SymMatrix":
        rows = tuple(tuple(r) for r in rows)
        if labels is None:
            labels = tuple(str(i) for i in range(len(rows)))
        m = cls(rows, tuple(labels))
        if check:
            for i in range(m.dim):
                for j in range(i):
                    if rows[i][j] != rows[j][i]:
                        raise ValueError(f"not symmetric at ({i}, {j})")
        return m

    @property
    def dim(self) -> int:
        return len(self.entries)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def index(self, label) -> int:
        return self.labels.index(label)

    def rows(self) -> list:
        return [list(r) for r in self.entries]

    def submatrix(self, idx: Sequence[int]) -> "SymMatrix":
        idx = list(idx)
        return SymMatrix(
            tuple(tuple(self.entries[i][j] for j in idx) for i in idx),
            tuple(self.labels[i] for i in idx),
        )

    def column(self, j: int) -> list:
        return [row[j] for row in self.entries]


def _lift(x):
    # plain ints would turn into floats under division
    return Fraction(x) if isinstance(x, int) else x


def _rows(M) -> list:
    rows = M.rows() if isinstance(M, SymMatrix) else M
    return [[_lift(x) for x in r] for r in rows]


def _all_rational(rows) -> bool:
    return all(isinstance(x, (int, Fraction)) for r in rows for x in r)


def _scale(rows, tol) -> object:
    """Absolute zero threshold for numeric entries: tol times the largest magnitude."""
    if tol is None:
        return None
    big = max((abs(x) for r in rows for x in r), default=0)
    return tol * max(1, big)


def _sgn(x, thr) -> int:
    if isinstance(x, (int, Fraction, QuadExt)):
        return exact_sign(x)
    if thr is None:
        raise TypeError("numeric entries need an explicit tolerance")
    if abs(x) <= thr:
        return 0
    return 1 if x > 0 else -1


def _is_zero(x, thr) -> bool:
    return _sgn(x, thr) == 0


# --- elementary helpers -------------------------------------------------------


def identity(n: int) -> list:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def transpose(A) -> list:
    A = _rows(A)
    return [list(c) for c in zip(*A)] if A else []


def dot(u, v):
    total = 0
    for a, b in zip(u, v):
        total = total + a * b
    return total


def matvec(A, v) -> list:
    return [dot(row, v) for row in _rows(A)]


def matmul(A, B) -> list:
    A, Bt = _rows(A), transpose(B)
    return [[dot(r, c) for c in Bt] for r in A]


# --- rank ---------------------------------------------------------------------


def _bareiss_rank(rows) -> int:
    # clear denominators row by row; rank is unchanged
    a = []
    for r in rows:
        den = math.lcm(*(Fraction(x).denominator for x in r))
        a.append([int(x * den) for x in r])
    m = len(a)
    n = len(a[0]) if m else 0
    prev = 1
    k = 0
    while k < min(m, n):
        piv = None
        for i in range(k, m):
            for j in range(k, n):
                if a[i][j] != 0:
                    piv = (i, j)
                    break
            if piv:
                break
        if piv is None:
            break
        pi, pj = piv
        a[k], a[pi] = a[pi], a[k]
        if pj != k:
            for row in a:
                row[k], row[pj] = row[pj], row[k]
        akk = a[k][k]
        for i in range(k + 1, m):
            aik = a[i][k]
            row_i, row_k = a[i], a[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * akk - aik * row_k[j]) // prev
            row_i[k] = 0
        prev = akk
        k += 1
    return k


def _elim_rank(rows, thr) -> int:
    a = [list(r) for r in rows]
    m = len(a)
    n = len(a[0]) if m else 0
    k = 0
    while k < min(m, n):
        piv = None
        for i in range(k, m):
            for j in range(k, n):
                if not _is_zero(a[i][j], thr):
                    piv = (i, j)
                    break
            if piv:
                break
        if piv is None:
            break
        pi, pj = piv
        a[k], a[pi] = a[pi], a[k]
        if pj != k:
            for row in a:
                row[k], row[pj] = row[pj], row[k]
        inv = 1 / a[k][k]
        for i in range(k + 1, m):
            f = a[i][k] * inv
            if _is_zero(f, None if thr is None else 0):
                continue
            for j in range(k + 1, n):
                a[i][j] = a[i][j] - f * a[k][j]
            a[i][k] = 0
        k += 1
    return k


def rank(M, tol=None) -> int:
    """Exact rank (numeric entries need ``tol``)."""
    rows = _rows(M)
    if not rows or not rows[0]:
        return 0
    if _all_rational(rows):
        return _bareiss_rank(rows)
    return _elim_rank(rows, _scale(rows, tol))


# --- definiteness -------------------------------------------------------------


def _schur_pivots(rows, thr):
    """Yield the signs met by the recursive Schur-complement test; ``None`` marks a failure."""
    a = [list(r) for r in rows]
    while a:
        d = a[0][0]
        s = _sgn(d, thr)
        if s < 0:
            yield None
            return
        if s == 0:
            if any(not _is_zero(x, thr) for x in a[0][1:]):
                yield None
                return
            yield 0
            a = [r[1:] for r in a[1:]]
            continue
        yield 1
        inv = 1 / d
        head = a[0]
        a = [
            [r[j] - r[0] * inv * head[j] for j in range(1, len(r))]
            for r in a[1:]
        ]


def is_psd(M, tol=None) -> bool:
    """Positive semidefiniteness by recursive exact Schur complements."""
    rows = _rows(M)
    return all(p is not None for p in _schur_pivots(rows, _scale(rows, tol)))


def is_pd(M, tol=None) -> bool:
    rows = _rows(M)
    return all(p == 1 for p in _schur_pivots(rows, _scale(rows, tol)))


# --- solving ------------------------------------------------------------------


def _pick_pivot(col_vals, thr):
    best = None
    for i, x in col_vals:
        if _is_zero(x, thr):
            continue
        if thr is None:
            return i
        if best is None or abs(x) > abs(best[1]):
            best = (i, x)
    return None if best is None else best[0]


def rref(A, tol=None):
    """Reduced row echelon form; returns (matrix, pivot columns)."""
    a = _rows(A)
    thr = _scale(a, tol)
    m = len(a)
    n = len(a[0]) if m else 0
    pivots = []
    r = 0
    for c in range(n):
        if r >= m:
            break
        p = _pick_pivot(((i, a[i][c]) for i in range(r, m)), thr)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(m):
            if i != r and not _is_zero(a[i][c], None if thr is None else 0):
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
    return a, pivots


def invert(M) -> list:
    """Exact inverse; raises SingularMatrixError."""
    rows = _rows(M)
    n = len(rows)
    aug = [list(r) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(rows)]
    red, piv = rref(aug)
    if piv[:n] != list(range(n)) or len(piv) < n:
        raise SingularMatrixError("matrix is singular; compress to a basis first")
    return [r[n:] for r in red]


def solve(M, b, tol=None) -> list:
    """Solve the nonsingular square system M x = b."""
    rows = _rows(M)
    n = len(rows)
    aug = [list(r) + [b[i]] for i, r in enumerate(rows)]
    red, piv = rref(aug, tol)
    if piv != list(range(n)):
        raise SingularMatrixError("system matrix is singular")
    return [red[i][n] for i in range(n)]


def column_space_solution(M, v, tol=None) -> Optional[list]:
    """Some x with M x = v, or None when v is outside the column space."""
    rows = _rows(M)
    m = len(rows)
    n = len(rows[0]) if m else 0
    aug = [list(r) + [v[i]] for i, r in enumerate(rows)]
    red, piv = rref(aug, tol)
    if n in piv:
        return None
    x = [0] * n
    for i, c in enumerate(piv):
        x[c] = red[i][n]
    return x


def in_column_space(M, v, tol=None) -> bool:
    rows = _rows(M)
    aug = [list(r) + [v[i]] for i, r in enumerate(rows)]
    return rank(aug, tol) == rank(rows, tol)


def nullspace(M, tol=None) -> list:
    """Basis of the right kernel."""
    rows = _rows(M)
    n = len(rows[0]) if rows else 0
    red, piv = rref(rows, tol)
    free = [c for c in range(n) if c not in piv]
    basis = []
    for f in free:
        vec = [Fraction(0)] * n
        vec[f] = Fraction(1)
        for i, c in enumerate(piv):
            vec[c] = -red[i][f]
        basis.append(vec)
    return basis


def schur_threshold(A, h, tol=None):
    """The value z* with [[A, h], [h^T, z]] psd exactly when z >= z* (A must be pd)."""
    return dot(h, solve(A, h, tol))
