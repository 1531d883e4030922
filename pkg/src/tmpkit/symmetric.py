"""Symmetric data (beta_ij = 0 for odd j) on y^2 = x^3 + a x + b.

The chain: keep even y-powers and write z = y^2, shear by
``(x, z) -> (x, z - a x - b)`` so the curve becomes ``u = x^3``, read the
moments as a univariate sequence ``gamma_{i+3j}``, and solve on the set of
``x`` with ``x^3 + a x + b >= 0``.  Solutions lift back by splitting each
atom ``x`` into ``(x, +-sqrt(z))`` with half the mass each.

The univariate problem is solved in unshifted coordinates with the support
origin at the smallest cubic root; this is the shifted problem up to the
translation ``t = x - x1`` and keeps rational data rational.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, lcm
from typing import Optional

import mpmath

from . import linalg
from .exact import QuadExt, as_fraction, exact_sum, is_exact, rational_sqrt, scalar_to_json, to_mpf
from .extract import AtomicMeasure, CertificationError, certify
from .moments import (
    BivariateMoments,
    CurveParams,
    DegenerateInputError,
    PurityReport,
    build_moment_matrix,
    check_p_pure,
    pushforward,
)
from .univariate import NUM, LineMeasure, Support, UnivariateSolution, solve_halfline, solve_union

NUMERIC_BITS = 256


class NotSymmetricError(ValueError):
    pass


class NotOnCurveError(ValueError):
    pass


# --- cubic roots --------------------------------------------------------------


def _peval(p, x):
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def _pderiv(p):
    return [i * c for i, c in enumerate(p)][1:]


def _prem(p, q):
    """Remainder of p modulo q (coefficients low first, exact)."""
    p = list(p)
    while len(p) >= len(q) and any(p):
        f = p[-1] / q[-1]
        shift = len(p) - len(q)
        for i, c in enumerate(q):
            p[i + shift] -= f * c
        p.pop()
    while p and p[-1] == 0:
        p.pop()
    return p


def sturm_sequence(p) -> list:
    seq = [list(p), _pderiv(p)]
    while seq[-1]:
        r = _prem(seq[-2], seq[-1])
        if not r:
            break
        seq.append([-c for c in r])
    return seq


def _sign_changes(seq, x) -> int:
    signs = [s for s in ((v > 0) - (v < 0) for v in (_peval(p, x) for p in seq)) if s]
    return sum(1 for u, v in zip(signs, signs[1:]) if u != v)


def count_roots(seq, lo, hi) -> int:
    """Distinct real roots in (lo, hi] (Sturm's theorem)."""
    return _sign_changes(seq, lo) - _sign_changes(seq, hi)


@dataclass(frozen=True)
class RootInterval:
    """An irrational root isolated in [lo, hi] with a numeric value."""

    lo: Fraction
    hi: Fraction
    approx: object

    def __float__(self):
        return float(self.approx)

    def to_json(self):
        return {
            "interval": [scalar_to_json(self.lo), scalar_to_json(self.hi)],
            "approx": mpmath.nstr(self.approx, 40),
        }


def _isolate(p, bits: int) -> list:
    """Sorted isolating intervals of the distinct real roots, refined to width 2^-bits."""
    seq = sturm_sequence(p)
    bound = 1 + max(abs(c / p[-1]) for c in p[:-1])
    todo = [(-bound, bound)]
    isolated = []
    while todo:
        lo, hi = todo.pop()
        k = count_roots(seq, lo, hi)
        if k == 0:
            continue
        if k == 1:
            isolated.append((lo, hi))
            continue
        mid = (lo + hi) / 2
        todo += [(lo, mid), (mid, hi)]
    out = []
    width = Fraction(1, 2**bits)
    for lo, hi in sorted(isolated):
        while hi - lo > width:
            mid = (lo + hi) / 2
            if _peval(p, mid) == 0:
                lo = hi = mid
                break
            if count_roots(seq, lo, mid) == 1:
                hi = mid
            else:
                lo = mid
        out.append((lo, hi))
    return out


@dataclass
class CubicRoots:
    """Distinct real roots of x^3 + a x + b in increasing order, with multiplicities."""

    roots: list
    multiplicities: list
    discriminant: Fraction
    exact: bool

    @property
    def distinct(self) -> int:
        return len(self.roots)

    def numeric(self) -> list:
        return [_numeric(r) for r in self.roots]

    def to_json(self) -> dict:
        return {
            "discriminant": scalar_to_json(self.discriminant),
            "exact": self.exact,
            "roots": [
                {"value": r.to_json() if isinstance(r, RootInterval) else scalar_to_json(r), "multiplicity": m}
                for r, m in zip(self.roots, self.multiplicities)
            ],
        }


def _numeric(r):
    if isinstance(r, RootInterval):
        return NUM.mpf(r.approx)
    return to_mpf(r, NUM)


def _rational_root(a: Fraction, b: Fraction) -> Optional[Fraction]:
    """A rational root of x^3 + a x + b, if any (denominators divide the cleared leading term)."""
    D = lcm(a.denominator, b.denominator)
    p = [b, a, Fraction(0), Fraction(1)]
    for lo, hi in _isolate(p, 8 + 2 * D.bit_length()):
        for num in {(lo * D).__floor__(), (hi * D).__ceil__()}:
            cand = Fraction(num, D)
            if _peval(p, cand) == 0:
                return cand
    return None


def cubic_real_roots(a, b, bits: int = NUMERIC_BITS) -> CubicRoots:
    """Real roots of x^3 + a x + b: exact (rational or quadratic) when possible, else isolated."""
    a, b = as_fraction(a), as_fraction(b)
    disc = -4 * a**3 - 27 * b**2
    r = _rational_root(a, b)
    if r is not None:
        # x^3 + a x + b = (x - r)(x^2 + r x + r^2 + a)
        qd = -3 * r * r - 4 * a
        found = {r: 1}
        if qd >= 0:
            sq = rational_sqrt(qd)
            if sq is not None:
                cands = [(-r - sq) / 2, (-r + sq) / 2]
            else:
                cands = [QuadExt(-r / 2, Fraction(-1, 2), qd), QuadExt(-r / 2, Fraction(1, 2), qd)]
            for c in cands:
                if isinstance(c, QuadExt) and c.is_rational:
                    c = c.u
                found[c] = found.get(c, 0) + 1
        roots = sorted(found, key=lambda z: _numeric(z))
        return CubicRoots(roots, [found[z] for z in roots], disc, True)
    # irreducible over Q: simple roots, none of them rational or quadratic
    p = [b, a, Fraction(0), Fraction(1)]
    roots = []
    for lo, hi in _isolate(p, bits):
        ctx = mpmath.ctx_mp.MPContext()
        ctx.prec = bits + 16
        approx = (to_mpf(lo, ctx) + to_mpf(hi, ctx)) / 2
        roots.append(RootInterval(lo, hi, approx))
    return CubicRoots(roots, [1] * len(roots), disc, False)


def support_for(roots: CubicRoots) -> Support:
    """The set {x : x^3 + a x + b >= 0} as a univariate support (absolute coordinates)."""
    vals = roots.roots if roots.exact else roots.numeric()
    if roots.distinct == 1:
        return Support(vals[0])
    if roots.distinct == 3:
        return Support(vals[0], vals[1], vals[2])
    # a double root: to the right of the simple root it changes nothing
    if roots.multiplicities[1] == 2:
        return Support(vals[0])
    raise DegenerateInputError(
        "the cubic has a double root left of its simple root: the support is a point plus a half-line "
        "(c = 0), which this solver does not handle"
    )


# --- reduction -----------------------------------------------------------------


@dataclass
class Reduction:
    beta_tilde: dict
    beta_hat: dict
    gamma: list
    gamma_tilde: list
    roots: CubicRoots
    support: Support  # absolute coordinates (origin x1)
    shifted: Support  # the standard form, origin 0


def _check_symmetric(beta: BivariateMoments):
    if not beta.is_symmetric():
        bad = sorted(ij for ij, v in beta.values.items() if ij[1] % 2 and v != 0)
        raise NotSymmetricError(f"data are not symmetric: beta_{bad[0][0]}{bad[0][1]} != 0")


def shift_sequence(gamma, x1) -> list:
    """Moments of the push-forward under t -> t - x1."""
    exact = is_exact(x1)
    g = list(gamma) if exact else [to_mpf(v, NUM) for v in gamma]
    s = x1 if exact else _numeric(x1)
    out = []
    for t in range(len(g)):
        terms = [comb(t, k) * (-s) ** (t - k) * g[k] for k in range(t + 1)]
        out.append(exact_sum(terms) if exact else sum(terms, 0))
    return out


def reduce(beta: BivariateMoments, curve: CurveParams, roots: Optional[CubicRoots] = None) -> Reduction:
    _check_symmetric(beta)
    n = beta.n
    idx = [(i, j) for j in range(n + 1) for i in range(2 * n - 2 * j + 1)]
    bt = {(i, j): beta[(i, 2 * j)] for (i, j) in idx}
    shear = {(0, 1): Fraction(1)}
    if curve.a:
        shear[(1, 0)] = -curve.a
    if curve.b:
        shear[(0, 0)] = -curve.b
    bh = pushforward(bt, idx, {(1, 0): Fraction(1)}, shear)
    gamma = {}
    for (i, j), v in sorted(bh.items()):
        t = i + 3 * j
        if t in gamma and gamma[t] != v:
            raise NotOnCurveError(
                f"moments disagree at gamma_{t}: the data are not supported on the curve"
            )
        gamma[t] = v
    if sorted(gamma) != list(range(3 * n + 1)):
        raise RuntimeError("univariate sequence has gaps")
    gamma = [gamma[t] for t in range(3 * n + 1)]
    roots = roots or cubic_real_roots(curve.a, curve.b)
    support = support_for(roots)
    x1 = support.origin
    shifted = (
        Support(0)
        if support.c is None
        else Support(0, support.c - x1, support.d - x1)
    )
    return Reduction(bt, bh, gamma, shift_sequence(gamma, x1), roots, support, shifted)


# --- lifting -------------------------------------------------------------------


def lift_measure(nu: LineMeasure, x1, curve: CurveParams, tol=mpmath.mpf("1e-30")) -> AtomicMeasure:
    """Atoms (x, +-sqrt(z)) with half weight each, x = t + x1, z = x^3 + a x + b."""
    atoms, weights = [], []
    for t, w in zip(nu.points, nu.weights):
        x = t + x1 if (is_exact(t) and is_exact(x1)) else _numeric(t) + _numeric(x1)
        if isinstance(x, QuadExt) and x.is_rational:
            x = x.u
        z = curve.cubic(x) if is_exact(x) else x**3 + to_mpf(curve.a, NUM) * x + to_mpf(curve.b, NUM)
        if z == 0:
            atoms.append((x, Fraction(0)))
            weights.append(w)
            continue
        if z < 0:
            if is_exact(z) or z < -tol * max(1, abs(x)) ** 3:
                raise NotOnCurveError(f"atom at x = {x} lies where x^3 + a x + b < 0")
            atoms.append((x, NUM.mpf(0)))
            weights.append(w)
            continue
        if isinstance(z, Fraction):
            y = QuadExt.sqrt(z)
            y = y.u if y.is_rational else y
        elif isinstance(z, QuadExt) and z.is_rational:
            y = QuadExt.sqrt(z.u)
            y = y.u if y.is_rational else y
        else:
            if is_exact(w):
                w = to_mpf(w, NUM)
            y = NUM.sqrt(_numeric(z))
            x = _numeric(x)
        half = w / 2
        atoms += [(x, -y), (x, y)]
        weights += [half, half]
    return AtomicMeasure(atoms, weights, precision_bits=NUMERIC_BITS)


# --- solver --------------------------------------------------------------------


@dataclass
class SymmetricSolution:
    status: str
    purity: Optional[PurityReport]
    reduction: Optional[Reduction]
    univariate: Optional[UnivariateSolution]
    measure: Optional[AtomicMeasure] = None
    mode: str = "exact"
    notes: list = field(default_factory=list)

    @property
    def exists(self) -> bool:
        return self.status == "measure-exists"


def solve_symmetric(beta: BivariateMoments, curve: CurveParams, mode: str = "auto") -> SymmetricSolution:
    """Decide the symmetric problem through the univariate reduction and lift a measure back."""
    _check_symmetric(beta)
    purity = None
    notes = []
    if beta.n >= 1:
        purity = check_p_pure(build_moment_matrix(beta), curve)
        if not purity.is_pure:
            notes.append("moment matrix is not p-pure; solved without assuming purity")
    red = reduce(beta, curve)
    exact = red.roots.exact and mode != "numeric"
    if mode == "exact" and not red.roots.exact:
        raise ValueError("exact mode needs cubic roots in Q or a quadratic field")
    sup = red.support
    if not exact:
        sup = Support(*(None if v is None else _numeric(v) for v in (sup.origin, sup.c, sup.d)))
    if sup.c is None:
        uni = solve_halfline(red.gamma, sup.origin)
    else:
        uni = solve_union(red.gamma, sup.c, sup.d, sup.origin)
    sol = SymmetricSolution(uni.status, purity, red, uni, mode="exact" if exact else "numeric", notes=notes)
    if not exact:
        sol.notes.append("cubic roots are irrational and not quadratic: psd verdicts use a 1e-30 tolerance")
        sol.univariate.checks["margins"] = _margins(red.gamma, sup)
    if uni.exists and uni.measure is not None:
        # univariate atoms are in absolute coordinates: lift with x1 = 0
        lifted = lift_measure(uni.measure, 0, curve)
        try:
            certify(lifted, beta, curve)
            sol.measure = lifted
        except CertificationError as err:
            sol.notes.append(f"lifted measure failed certification: {err}")
    return sol


def _margins(gamma, support: Support) -> dict:
    """Smallest eigenvalue of each checked matrix, for numeric-mode verdicts."""
    from .univariate import HankelSet

    out = {}
    for name, M in HankelSet.build(gamma, support).named():
        if M.dim == 0:
            continue
        A = NUM.matrix([[_numeric(x) if not isinstance(x, (int, Fraction)) else to_mpf(x, NUM) for x in row] for row in M.rows()])
        out[name] = mpmath.nstr(min(NUM.eigsy(A, eigvals_only=True)), 8)
    return out
