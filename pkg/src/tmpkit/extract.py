"""Atomic measures from flat moment matrices.

Given a flat extension, multiplication by X and by Y acts on the column
space of ``M(n+1)`` and is represented in the basis ``B`` by two commuting
matrices.  The evaluation vectors ``(b(x_r, y_r))_{b in B}`` are common
left eigenvectors, so the atoms are read off a generic combination of the
two operators.  That eigen-step is numeric; everything before it is exact,
and the result is certified by moment and curve residuals afterwards.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Optional, Sequence

import mpmath

from . import linalg
from .exact import exact_sum, is_exact, scalar_to_json, to_mpf
from .linalg import SymMatrix
from .moments import BivariateMoments, CurveParams, monomials

DEFAULT_PRECISION = 128
DEFAULT_TOLERANCE = mpmath.mpf("1e-20")
MAX_RETRIES = 8


class ExtractionError(RuntimeError):
    pass


class CertificationError(RuntimeError):
    pass


@dataclass
class AtomicMeasure:
    """Finitely atomic measure with its certification residuals."""

    atoms: list
    weights: list
    residual_moments: object = None
    residual_curve: object = None
    precision_bits: int = DEFAULT_PRECISION
    notes: list = field(default_factory=list)

    def __len__(self):
        return len(self.atoms)

    @property
    def exact(self) -> bool:
        return all(is_exact(c) for xy in self.atoms for c in xy) and all(
            is_exact(w) for w in self.weights
        )

    def moments(self, degree: int) -> dict:
        exact = self.exact
        vals = {}
        for i, j in monomials(degree):
            terms = [w * x**i * y**j for (x, y), w in zip(self.atoms, self.weights)]
            vals[(i, j)] = exact_sum(terms) if exact else sum(terms, 0)
        return vals

    def to_json(self) -> dict:
        digits = max(20, int(self.precision_bits * 0.30103))
        out = {
            "atoms": [
                {
                    "x": scalar_to_json(x, digits),
                    "y": scalar_to_json(y, digits),
                    "weight": scalar_to_json(w, digits),
                }
                for (x, y), w in zip(self.atoms, self.weights)
            ],
            "residual_moments": _residual_json(self.residual_moments),
            "residual_curve": _residual_json(self.residual_curve),
            "precision_bits": self.precision_bits,
        }
        if self.notes:
            out["notes"] = list(self.notes)
        return out


def _residual_json(r):
    if r is None:
        return None
    if is_exact(r):
        return scalar_to_json(r)
    return mpmath.nstr(r, 6)


def _context(bits: int):
    ctx = mpmath.ctx_mp.MPContext()
    ctx.prec = bits
    return ctx


# --- exact stage --------------------------------------------------------------


def multiplication_matrices(fe=None, *, matrix: Optional[SymMatrix] = None, basis=None):
    """Coordinates of the columns X*b and Y*b (b in the basis) in that basis.

    Pass a :class:`~tmpkit.flat_ext.FlatExtension`, or any flat moment matrix
    of order k+1 together with a basis of monomials of degree <= k.
    """
    if fe is not None:
        matrix, basis = fe.Mn1, fe.compressed.basis
    if matrix is None or basis is None:
        raise ValueError("need a flat extension or a matrix with a basis")
    mons = monomials(_order(matrix.dim))
    pos = {m: i for i, m in enumerate(mons)}
    bidx = [pos[m] for m in basis]
    MB = [[matrix[r, c] for c in bidx] for r in bidx]
    MB_inv = linalg.invert(MB)

    def operator(shift):
        cols = []
        for (i, j) in basis:
            target = pos[(i + shift[0], j + shift[1])]
            cols.append(linalg.matvec(MB_inv, [matrix[r, target] for r in bidx]))
        return linalg.transpose(cols)

    Mx, My = operator((1, 0)), operator((0, 1))
    if linalg.matmul(Mx, My) != linalg.matmul(My, Mx):
        raise ExtractionError("multiplication operators do not commute; extension is not flat")
    return Mx, My


def _order(dim: int) -> int:
    k = 0
    while (k + 1) * (k + 2) // 2 < dim:
        k += 1
    return k


# --- numeric stage ------------------------------------------------------------


def _to_ctx_matrix(ctx, A):
    return ctx.matrix([[to_mpf(x, ctx) for x in row] for row in A])


def _min_gap(ctx, vals):
    vals = sorted(vals, key=lambda z: (ctx.re(z), ctx.im(z)))
    if len(vals) < 2:
        return ctx.inf
    return min(abs(vals[i + 1] - vals[i]) for i in range(len(vals) - 1))


def extract_atoms(Mx, My, precision: int = DEFAULT_PRECISION, seed: int = 0) -> AtomicMeasure:
    """Joint eigenvalues (x_r, y_r) of a commuting pair; weights are left empty."""
    k = len(Mx)
    if k == 0:
        return AtomicMeasure([], [], precision_bits=precision)
    work = 2 * precision + 64
    ctx = _context(work)
    MxT = _to_ctx_matrix(ctx, linalg.transpose(Mx))
    MyT = _to_ctx_matrix(ctx, linalg.transpose(My))
    scale = max(1, max(abs(to_mpf(x, ctx)) for r in Mx + My for x in r))
    cluster = scale * ctx.mpf(2) ** (-(precision // 2))
    rng = random.Random(seed)
    for _ in range(MAX_RETRIES):
        s = ctx.mpf(rng.uniform(0.5, 1.5))
        t = ctx.mpf(rng.uniform(0.5, 1.5))
        E, V = ctx.eig(s * MxT + t * MyT)
        if _min_gap(ctx, E) <= cluster:
            continue
        atoms = []
        for r in range(k):
            v = V[:, r]
            nrm = sum(abs(v[i]) ** 2 for i in range(k))
            x = sum(ctx.conj(v[i]) * (MxT * v)[i] for i in range(k)) / nrm
            y = sum(ctx.conj(v[i]) * (MyT * v)[i] for i in range(k)) / nrm
            if abs(ctx.im(x)) > cluster or abs(ctx.im(y)) > cluster:
                raise ExtractionError("non-real joint eigenvalue: data have no real atomic measure")
            atoms.append((ctx.re(x), ctx.re(y)))
        atoms.sort(key=lambda xy: (xy[0], xy[1]))
        return AtomicMeasure(atoms, [], precision_bits=precision)
    raise ExtractionError("extraction failed, increase precision (clustered spectrum)")


def solve_weights(
    atoms: Sequence,
    beta: BivariateMoments,
    basis: Sequence,
    precision: int = DEFAULT_PRECISION,
    curve: Optional[CurveParams] = None,
    tolerance=DEFAULT_TOLERANCE,
) -> AtomicMeasure:
    """Weights from the Vandermonde system on the basis, then residual certification."""
    atoms = [tuple(a) for a in atoms]
    if len(atoms) != len(basis):
        raise CertificationError(f"{len(atoms)} atoms for a basis of size {len(basis)}")
    exact = all(is_exact(c) for xy in atoms for c in xy)
    if exact:
        V = [[x**i * y**j for (x, y) in atoms] for (i, j) in basis]
        rho = linalg.solve(V, [beta[m] for m in basis])
    else:
        ctx = _context(2 * precision + 64)
        pts = [(to_mpf(x, ctx), to_mpf(y, ctx)) for x, y in atoms]
        V = ctx.matrix([[x**i * y**j for (x, y) in pts] for (i, j) in basis])
        rhs = ctx.matrix([to_mpf(beta[m], ctx) for m in basis])
        try:
            sol = ctx.lu_solve(V, rhs)
        except ZeroDivisionError:
            raise CertificationError("atoms are not distinct: Vandermonde system is singular")
        rho = [sol[i] for i in range(len(basis))]
        atoms = pts
    measure = AtomicMeasure(atoms, rho, precision_bits=precision)
    certify(measure, beta, curve, tolerance)
    return measure


def certify(measure: AtomicMeasure, beta: BivariateMoments, curve=None, tolerance=DEFAULT_TOLERANCE):
    """Fill in residuals and raise CertificationError when the measure does not represent beta."""
    if any(w <= 0 for w in measure.weights):
        raise CertificationError("certification failed: nonpositive weight")
    got = measure.moments(beta.degree)
    if measure.exact:
        res = max((abs(got[ij] - beta[ij]) for ij in got), default=0)
        measure.residual_moments = res
        if curve is not None:
            measure.residual_curve = max(
                (abs(curve.evaluate(x, y)) for x, y in measure.atoms), default=0
            )
        if res != 0 or (curve is not None and measure.residual_curve != 0):
            raise CertificationError("certification failed: exact moments not reproduced")
        return measure
    ctx = _context(2 * measure.precision_bits + 64)
    res = ctx.mpf(0)
    for ij, val in got.items():
        ref = to_mpf(beta[ij], ctx)
        res = max(res, abs(val - ref) / max(1, abs(ref)))
    measure.residual_moments = res
    if curve is not None:
        a, b = to_mpf(curve.a, ctx), to_mpf(curve.b, ctx)
        measure.residual_curve = max(
            (abs(y * y - x**3 - a * x - b) for x, y in measure.atoms), default=ctx.mpf(0)
        )
        if measure.residual_curve > tolerance:
            raise CertificationError(f"certification failed: atom off the curve by {measure.residual_curve}")
    if res > tolerance:
        raise CertificationError(f"certification failed: moment residual {mpmath.nstr(res, 5)}")
    return measure


def extract_measure(
    fe,
    precision: int = DEFAULT_PRECISION,
    tolerance=DEFAULT_TOLERANCE,
    seed: int = 0,
) -> AtomicMeasure:
    """Full pipeline from a verified flat extension to a certified measure."""
    Mx, My = multiplication_matrices(fe)
    found = extract_atoms(Mx, My, precision, seed)
    cd = fe.compressed
    return solve_weights(found.atoms, cd.beta, cd.basis, precision, cd.curve, tolerance)
