"""Bivariate truncated moment sequences and their moment matrices.

The curve is always written ``y^2 = x^3 + a x + b``, i.e. the polynomial
``p(x, y) = y^2 - x^3 - a x - b``.  Monomials are ordered degree-lex:
``1, X, Y, X^2, XY, Y^2, X^3, ...``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Dict, Iterable, Optional, Sequence, Tuple

from . import linalg
from .exact import as_fraction, exact_sum, is_exact
from .linalg import SymMatrix

Index = Tuple[int, int]
Poly = Dict[Index, object]


class MissingMomentError(KeyError):
    pass


class DegenerateInputError(ValueError):
    pass


# --- monomials ----------------------------------------------------------------


def monomials(k: int) -> list:
    """Exponent pairs of total degree <= k in degree-lex order."""
    return [(t - j, j) for t in range(k + 1) for j in range(t + 1)]


def monomial_label(ij: Index) -> str:
    i, j = ij
    if i == j == 0:
        return "1"
    part = lambda v, e: "" if e == 0 else (v if e == 1 else f"{v}^{e}")
    return part("X", i) + part("Y", j)


def matrix_dim(n: int) -> int:
    return (n + 1) * (n + 2) // 2


def order_from_dim(dim: int) -> int:
    n = 0
    while matrix_dim(n) < dim:
        n += 1
    if matrix_dim(n) != dim:
        raise ValueError(f"{dim} is not a moment-matrix dimension")
    return n


# --- data types ---------------------------------------------------------------


@dataclass(frozen=True)
class CurveParams:
    a: Fraction
    b: Fraction

    def __post_init__(self):
        object.__setattr__(self, "a", as_fraction(self.a))
        object.__setattr__(self, "b", as_fraction(self.b))

    def polynomial(self) -> Poly:
        """``y^2 - x^3 - a x - b`` as an exponent dict."""
        return {(0, 2): Fraction(1), (3, 0): Fraction(-1), (1, 0): -self.a, (0, 0): -self.b}

    def evaluate(self, x, y):
        return y * y - x * x * x - self.a * x - self.b

    def cubic(self, x):
        return x * x * x + self.a * x + self.b


@dataclass(frozen=True)
class BivariateMoments:
    """Moments beta_ij for i + j <= degree (degree 2n for solver input)."""

    degree: int
    values: Dict[Index, object]

    def __post_init__(self):
        for ij in monomials(self.degree):
            if ij not in self.values:
                raise MissingMomentError(f"missing moment beta_{ij[0]}{ij[1]}")

    @property
    def n(self) -> int:
        return self.degree // 2

    def __getitem__(self, ij: Index):
        try:
            return self.values[ij]
        except KeyError:
            raise MissingMomentError(f"missing moment beta_{ij[0]}{ij[1]}") from None

    def is_zero(self) -> bool:
        return all(v == 0 for v in self.values.values())

    def is_symmetric(self) -> bool:
        return all(v == 0 for (i, j), v in self.values.items() if j % 2)

    def truncate(self, degree: int) -> "BivariateMoments":
        return BivariateMoments(
            degree, {ij: v for ij, v in self.values.items() if sum(ij) <= degree}
        )


@dataclass
class PurityReport:
    psd: bool
    rank: int
    curve_relation_holds: bool
    is_pure: bool
    basis_invertible: bool = False
    kernel_dim: int = 0
    expected_kernel_dim: int = 0
    offending_kernel_vector: Optional[list] = None
    failures: list = field(default_factory=list)


# --- polynomial helpers -------------------------------------------------------


def poly_mul(p: Poly, q: Poly) -> Poly:
    out: Poly = {}
    for (i1, j1), c1 in p.items():
        for (i2, j2), c2 in q.items():
            key = (i1 + i2, j1 + j2)
            out[key] = out.get(key, 0) + c1 * c2
    return {k: v for k, v in out.items() if v != 0}


def poly_pow(p: Poly, k: int) -> Poly:
    out: Poly = {(0, 0): Fraction(1)}
    for _ in range(k):
        out = poly_mul(out, p)
    return out


def poly_degree(p: Poly) -> int:
    return max((i + j for (i, j), c in p.items() if c != 0), default=0)


# --- operations ---------------------------------------------------------------


def build_moment_matrix(beta: BivariateMoments, n: Optional[int] = None) -> SymMatrix:
    """M(n) with rows/columns labelled by degree-lex monomials."""
    n = beta.n if n is None else n
    mons = monomials(n)
    rows = [[beta[(i + k, j + l)] for (k, l) in mons] for (i, j) in mons]
    return SymMatrix(tuple(map(tuple, rows)), tuple(monomial_label(m) for m in mons))


def riesz(beta: BivariateMoments, poly: Poly):
    """The Riesz functional L_beta(poly) = sum a_ij beta_ij."""
    if poly_degree(poly) > beta.degree:
        raise ValueError(
            f"polynomial degree {poly_degree(poly)} exceeds moment degree {beta.degree}"
        )
    total = Fraction(0)
    for ij, c in poly.items():
        if c != 0:
            total = total + c * beta[ij]
    return total


def relation_vector(i: int, j: int, curve: CurveParams, n: int) -> list:
    """Coefficients of X^i Y^(j+2) - X^(i+3) Y^j - a X^(i+1) Y^j - b X^i Y^j over monomials(n)."""
    mons = monomials(n)
    vec = [Fraction(0)] * len(mons)
    for (di, dj), c in curve.polynomial().items():
        vec[mons.index((i + di, j + dj))] += c
    return vec


def recursive_relations(curve: CurveParams, n: int) -> list:
    return [relation_vector(i, j, curve, n) for (i, j) in monomials(n - 3)] if n >= 3 else []


def basis_B(n: int) -> list:
    """The column basis {1, X, Y} U {X^2 Y^(k-2), X Y^(k-1), Y^k : 2 <= k <= n}."""
    out = [(0, 0), (1, 0), (0, 1)]
    for k in range(2, n + 1):
        out += [(2, k - 2), (1, k - 1), (0, k)]
    return out


def check_p_pure(M: SymMatrix, curve: CurveParams) -> PurityReport:
    """psd, rank 3n, curve relations in the kernel, and kernel spanned by them."""
    n = order_from_dim(M.dim)
    failures = []
    psd = linalg.is_psd(M)
    if not psd:
        failures.append("moment matrix is not positive semidefinite")
    rk = linalg.rank(M)
    rels = recursive_relations(curve, n)
    holds = all(all(x == 0 for x in linalg.matvec(M, v)) for v in rels)
    if not holds:
        failures.append("column relation Y^2 = X^3 + aX + b (or a recursive shift) fails")
    expected = M.dim - 3 * n
    kdim = M.dim - rk
    if rk != 3 * n:
        failures.append(f"rank {rk} differs from 3n = {3 * n}")
    mons = monomials(n)
    bidx = [mons.index(m) for m in basis_B(n)]
    basis_ok = linalg.rank(M.submatrix(bidx)) == len(bidx)
    if not basis_ok:
        failures.append("compression to the basis B is singular")
    offending = None
    if kdim > 0 and (kdim != expected or not holds):
        span = rels
        for v in linalg.nullspace(M):
            if not span or linalg.rank(span + [v]) > linalg.rank(span):
                offending = v
                break
    pure = psd and holds and rk == 3 * n and kdim == expected and basis_ok and n >= 3
    if n < 3:
        failures.append("purity analysis needs n >= 3")
    return PurityReport(
        psd=psd,
        rank=rk,
        curve_relation_holds=holds,
        is_pure=pure,
        basis_invertible=basis_ok,
        kernel_dim=kdim,
        expected_kernel_dim=expected,
        offending_kernel_vector=offending,
        failures=failures,
    )


def pushforward(values: Dict[Index, object], indices: Iterable[Index], phi1: Poly, phi2: Poly) -> dict:
    """Moments of the image sequence: new_ij = L(phi1^i phi2^j) over the given index set."""
    indices = list(indices)
    pow1 = {0: {(0, 0): Fraction(1)}}
    pow2 = {0: {(0, 0): Fraction(1)}}
    for i in range(1, max(i for i, _ in indices) + 1):
        pow1[i] = poly_mul(pow1[i - 1], phi1)
    for j in range(1, max(j for _, j in indices) + 1):
        pow2[j] = poly_mul(pow2[j - 1], phi2)
    out = {}
    for i, j in indices:
        poly = poly_mul(pow1[i], pow2[j])
        total = Fraction(0)
        for ij, c in poly.items():
            if ij not in values:
                raise MissingMomentError(f"pushforward needs beta_{ij[0]}{ij[1]}")
            total = total + c * values[ij]
        out[(i, j)] = total
    return out


def affine_transform(beta: BivariateMoments, coeffs: Sequence) -> BivariateMoments:
    """Image of beta under (x, y) -> (a + b x + c y, d + e x + f y)."""
    a, b, c, d, e, f = (as_fraction(t) for t in coeffs)
    if b * f - c * e == 0:
        raise ValueError("affine map has a singular linear part (bf - ce = 0)")
    phi1 = {k: v for k, v in {(0, 0): a, (1, 0): b, (0, 1): c}.items() if v != 0}
    phi2 = {k: v for k, v in {(0, 0): d, (1, 0): e, (0, 1): f}.items() if v != 0}
    vals = pushforward(beta.values, monomials(beta.degree), phi1, phi2)
    return BivariateMoments(beta.degree, vals)


def moments_from_atoms(atoms: Sequence, weights: Sequence, degree: int) -> BivariateMoments:
    """beta_ij = sum_r rho_r x_r^i y_r^j, exactly for exact atoms."""
    if len(atoms) != len(weights):
        raise ValueError("atoms and weights differ in length")
    terms = {ij: [] for ij in monomials(degree)}
    for (x, y), w in zip(atoms, weights):
        xp = [1]
        yp = [1]
        for _ in range(degree):
            xp.append(xp[-1] * x)
            yp.append(yp[-1] * y)
        for i, j in terms:
            terms[(i, j)].append(w * xp[i] * yp[j])
    exact = all(is_exact(c) for xy in atoms for c in xy) and all(is_exact(w) for w in weights)
    vals = {ij: exact_sum(t) if exact else sum(t, 0) for ij, t in terms.items()}
    return BivariateMoments(degree, vals)
