"""Univariate truncated moment problems on [e, oo) and on [e, c] U [d, oo).

Sequences are ``gamma_0 .. gamma_N``.  Hankel matrices carry the "largest
index" naming: ``hankel_by_index(gamma, r, L)`` is the Hankel matrix of the
localized sequence ``L(E) gamma`` whose entries use gamma up to ``gamma_r``.

The support has an origin ``e`` (0 in the standard form) so that the
symmetric solver can work with unshifted, rational data.  All verdicts are
exact whenever the entries are rationals or live in one quadratic field.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import mpmath

from . import linalg
from .exact import QuadExt, is_exact, scalar_to_json, to_mpf
from .linalg import SymMatrix

NUMERIC_TOL = mpmath.mpf("1e-30")
RESIDUAL_TOL = mpmath.mpf("1e-20")

# shared read-only context for numeric-mode values
NUM = mpmath.ctx_mp.MPContext()
NUM.prec = 256


def _num(x):
    if is_exact(x):
        return to_mpf(x, NUM)
    return NUM.mpf(x)


def _uniform(values) -> list:
    """Values unchanged when all exact, else all converted to numeric."""
    values = list(values)
    if all(is_exact(v) for v in values):
        return values
    return [_num(v) for v in values]


# --- sequences ----------------------------------------------------------------


@dataclass(frozen=True)
class UnivariateMoments:
    values: tuple

    def __init__(self, values):
        object.__setattr__(self, "values", tuple(values))

    @property
    def N(self) -> int:
        return len(self.values) - 1

    def __getitem__(self, t):
        return self.values[t]

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    @property
    def exact(self) -> bool:
        return all(is_exact(g) for g in self.values)

    def truncate(self, N: int) -> "UnivariateMoments":
        return UnivariateMoments(self.values[: N + 1])

    def to_json(self) -> dict:
        return {"N": self.N, "gamma": [scalar_to_json(g) for g in self.values]}


def _seq(gamma) -> tuple:
    return gamma.values if isinstance(gamma, UnivariateMoments) else tuple(gamma)


def _tol(entries, tol):
    if all(is_exact(x) for x in entries):
        return None
    return NUMERIC_TOL if tol is None else tol


@dataclass(frozen=True)
class Support:
    """``[origin, oo)`` when ``c`` is None, else ``[origin, c] U [d, oo)``."""

    origin: object = 0
    c: object = None
    d: object = None

    @property
    def kind(self) -> str:
        return "halfline" if self.c is None else "union"

    def localizers(self) -> dict:
        """Localizing polynomials (coefficients, low degree first), by name."""
        one = Fraction(1)
        e = one * self.origin
        out = {"plain": [one], "halfline": [-e, one]}
        if self.c is not None:
            c, d = self.c, self.d
            outer = [c * d, -(c + d), one]
            out["outer"] = outer
            out["union"] = poly_mul([-e, one], outer)
        return out

    def contains(self, t, tol=None) -> bool:
        ends = [self.origin] + ([] if self.c is None else [self.c, self.d])
        t, *ends = _uniform([t] + ends)
        slack = 0 if tol is None or is_exact(t) else tol * max(1, abs(t))
        if t < ends[0] - slack:
            return False
        if self.c is None:
            return True
        return t <= ends[1] + slack or t >= ends[2] - slack

    def to_json(self) -> dict:
        if self.c is None:
            return {"kind": "halfline", "origin": scalar_to_json(self.origin)}
        return {
            "kind": "union",
            "origin": scalar_to_json(self.origin),
            "c": scalar_to_json(self.c),
            "d": scalar_to_json(self.d),
        }


# --- polynomials in one variable (coefficient lists, low degree first) --------


def poly_mul(p, q) -> list:
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] = out[i + j] + a * b
    return out


def poly_eval(p, t):
    acc = 0
    for c in reversed(p):
        acc = acc * t + c
    return acc


def _deflate(p, r) -> list:
    """Quotient of p by (t - r); the remainder is assumed zero."""
    n = len(p) - 1
    q = [0] * n
    acc = 0
    for k in range(n, 0, -1):
        acc = acc * r + p[k]
        q[k - 1] = acc
    return q


# --- Hankel matrices ----------------------------------------------------------


def hankel(gamma, m: int) -> SymMatrix:
    """``H_m(gamma) = (gamma_{i+j})_{i,j=0..m}``."""
    g = _seq(gamma)
    if 2 * m > len(g) - 1:
        raise IndexError(f"H_{m} needs gamma up to index {2 * m}, have {len(g) - 1}")
    rows = [[g[i + j] for j in range(m + 1)] for i in range(m + 1)]
    return SymMatrix(tuple(map(tuple, rows)), tuple(str(i) for i in range(m + 1)))


def localize(gamma, poly) -> list:
    """``p(E) gamma`` truncated to its first ``N + 1 - deg p`` entries."""
    g = _seq(gamma)
    k = len(poly) - 1
    if k > len(g) - 1:
        raise IndexError("localizing polynomial degree exceeds the sequence length")
    return [sum((poly[i] * g[t + i] for i in range(k + 1)), 0) for t in range(len(g) - k)]


def hankel_by_index(gamma, r: int, poly=(1,)) -> SymMatrix:
    """The localizing Hankel matrix whose largest gamma index is ``r``."""
    span = r - (len(poly) - 1)
    if span < 0:
        return SymMatrix((), ())
    if span % 2:
        raise ValueError(f"index {r} does not fit a localizer of degree {len(poly) - 1}")
    return hankel(localize(_seq(gamma)[: r + 1], list(poly)), span // 2)


def _largest_index(N: int, degree: int) -> int:
    # largest r <= N with r - degree even
    return N if (N - degree) % 2 == 0 else N - 1


@dataclass
class HankelSet:
    """The four (localizing) Hankel matrices used on a given support, at their largest indices."""

    H: SymMatrix
    Hpos: SymMatrix
    Hcd: Optional[SymMatrix]
    Hucd: Optional[SymMatrix]
    indices: dict
    c: object = None
    d: object = None

    @classmethod
    def build(cls, gamma, support: Support) -> "HankelSet":
        g = _seq(gamma)
        N = len(g) - 1
        locs = support.localizers()
        mats, idx = {}, {}
        for name in ("plain", "halfline", "outer", "union"):
            if name not in locs:
                mats[name] = None
                continue
            r = _largest_index(N, len(locs[name]) - 1)
            idx[name] = r
            mats[name] = hankel_by_index(g, r, locs[name])
        return cls(mats["plain"], mats["halfline"], mats["outer"], mats["union"], idx, support.c, support.d)

    def named(self) -> list:
        out = [("plain", self.H), ("halfline", self.Hpos)]
        if self.Hcd is not None:
            out += [("outer", self.Hcd), ("union", self.Hucd)]
        return out


# --- rank, recursive generation, singular extension ---------------------------


def rank_gamma(gamma, tol=None) -> int:
    """Rank of gamma: k+1 if H_k is nonsingular, else the first singular index."""
    g = _seq(gamma)
    k = (len(g) - 1) // 2
    tol = _tol(g, tol)
    if not linalg.is_psd(hankel(g, k), tol):
        raise ValueError("rank of a sequence is defined for psd Hankel matrices only")
    for i in range(k + 1):
        if linalg.rank(hankel(g, i), tol) < i + 1:
            return i
    return k + 1


def recursion_coefficients(gamma, tol=None) -> Optional[list]:
    """phi with gamma_j = sum phi_i gamma_{j-r+i}, from the r x r block H_{r-1}; None if undefined."""
    g = _seq(gamma)
    tol = _tol(g, tol)
    r = rank_gamma(g, tol)
    if r == 0:
        return []
    if 2 * r - 1 > len(g) - 1:
        return None
    A = hankel(g, r - 1)
    if not linalg.is_pd(A, tol):
        return None
    return linalg.solve(A, list(g[r : 2 * r]), tol)


def _close(a, b, tol) -> bool:
    if tol is None:
        return a == b
    return abs(a - b) <= tol * max(1, abs(a), abs(b))


def is_prg(gamma, tol=None) -> bool:
    """Positively recursively generated (recursion checked through the last given index)."""
    g = _seq(gamma)
    tol = _tol(g, tol)
    k = (len(g) - 1) // 2
    if not linalg.is_psd(hankel(g, k), tol):
        return False
    r = rank_gamma(g, tol)
    phi = recursion_coefficients(g, tol)
    if phi is None:
        # nonsingular H_k with no room for a recursion: nothing to violate
        return r == k + 1
    for j in range(r, len(g)):
        pred = sum((phi[i] * g[j - r + i] for i in range(r)), 0)
        if not _close(pred, g[j], tol):
            return False
    return True


def continue_sequence(gamma, count: int, tol=None) -> Optional[list]:
    """The next ``count`` moments forced by the recursion, or None if gamma is not PRG."""
    g = list(_seq(gamma))
    tol = _tol(g, tol)
    if not is_prg(g, tol):
        return None
    phi = recursion_coefficients(g, tol)
    if phi is None:
        return None
    r = len(phi)
    out = []
    for _ in range(count):
        nxt = sum((phi[i] * g[len(g) - r + i] for i in range(r)), 0) if r else 0
        g.append(nxt)
        out.append(nxt)
    return out


def extend_singular(gamma, tol=None) -> Optional[list]:
    """gamma_{2m+1..2m+4} for a singular psd H_m, or None when no psd H_{m+2} extension exists."""
    g = _seq(gamma)
    tol = _tol(g, tol)
    if (len(g) - 1) % 2:
        raise ValueError("extend_singular expects an even-degree sequence gamma_0..gamma_2m")
    m = (len(g) - 1) // 2
    Hm = hankel(g, m)
    if not linalg.is_psd(Hm, tol):
        raise ValueError("H_m is not positive semidefinite")
    if linalg.rank(Hm, tol) == m + 1:
        raise ValueError("H_m is nonsingular; the continuation is not unique")
    new = continue_sequence(g, 4, tol)
    if new is None:
        return None
    if not linalg.is_psd(hankel(list(g) + new, m + 2), tol):
        return None
    return new


# --- roots and measures on the line -------------------------------------------


@dataclass
class LineMeasure:
    points: list
    weights: list
    residual: object = None
    notes: list = field(default_factory=list)

    @property
    def exact(self) -> bool:
        return all(is_exact(x) for x in self.points + self.weights)

    def moments(self, N: int) -> list:
        vals = _uniform(self.points + self.weights)
        pts, wts = vals[: len(self.points)], vals[len(self.points) :]
        return [sum((w * t**j for t, w in zip(pts, wts)), 0) for j in range(N + 1)]

    def __len__(self):
        return len(self.points)

    def to_json(self, digits: int = 40) -> dict:
        return {
            "atoms": [
                {"t": scalar_to_json(t, digits), "weight": scalar_to_json(w, digits)}
                for t, w in zip(self.points, self.weights)
            ],
            "residual": None if self.residual is None else scalar_to_json(self.residual, 8),
        }


def _context(bits):
    ctx = mpmath.ctx_mp.MPContext()
    ctx.prec = bits
    return ctx


def _rational_denominator_bound(p) -> Optional[int]:
    """Leading coefficient of p (or its norm) after clearing denominators."""
    if all(isinstance(c, (int, Fraction)) or (isinstance(c, QuadExt) and c.is_rational) for c in p):
        q = [Fraction(c.u) if isinstance(c, QuadExt) else Fraction(c) for c in p]
    elif all(is_exact(c) for c in p):
        conj = [c.conjugate() if isinstance(c, QuadExt) else c for c in p]
        prod = poly_mul(p, conj)
        q = [Fraction(c.u) if isinstance(c, QuadExt) else Fraction(c) for c in prod]
    else:
        return None
    den = math.lcm(*(c.denominator for c in q))
    return abs(int(q[-1] * den))


def real_roots(p, bits: int = 256, tol=None):
    """Real roots of p (coefficients low first): exact where rational, mpf otherwise.

    Returns None when p has a non-real root.  Rational roots are found by
    reconstruction from a numeric approximation and confirmed exactly.
    """
    p = list(p)
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    found = []
    while len(p) > 1:
        lead = _rational_denominator_bound(p)
        extra = 0 if lead is None else lead.bit_length()
        ctx = _context(bits + extra)
        approx = ctx.polyroots(
            [to_mpf(c, ctx) for c in reversed(p)], maxsteps=400, extraprec=bits + extra
        )
        if not isinstance(approx, list):
            approx = [approx]
        hit = None
        if lead is not None:
            for z in approx:
                if abs(ctx.im(z)) > ctx.mpf(2) ** (-bits // 4) * max(1, abs(z)):
                    continue
                cand = Fraction(int(ctx.nint(ctx.re(z) * lead)), lead)
                if poly_eval(p, cand) == 0:
                    hit = cand
                    break
        if hit is None:
            leftover = []
            for z in approx:
                if abs(ctx.im(z)) > (tol or NUMERIC_TOL) * max(1, abs(z)):
                    return None
                leftover.append(ctx.re(z))
            found += [NUM.mpf(x) for x in leftover]
            break
        found.append(hit)
        p = _deflate(p, hit)
    return sorted(found, key=float)


def _vandermonde_weights(points, moments, tol):
    r = len(points)
    V = [[t**j for t in points] for j in range(r)]
    if all(is_exact(x) for x in points + list(moments[:r])):
        return linalg.solve(V, list(moments[:r]))
    A = NUM.matrix([[_num(x) for x in row] for row in V])
    b = NUM.matrix([_num(x) for x in moments[:r]])
    sol = NUM.lu_solve(A, b)
    return [sol[i] for i in range(r)]


def flatten(s, tol=None) -> Optional[LineMeasure]:
    """The measure of the flat (rank-preserving) continuation of s, on the real line.

    Works when H(s) is singular and recursively generated, or when the top
    index is odd and the top Hankel block is nonsingular.
    """
    s = list(s)
    tol = _tol(s, tol)
    N = len(s) - 1
    k = N // 2
    if N < 0 or not linalg.is_psd(hankel(s, k), tol):
        return None
    r = rank_gamma(s, tol)
    if r == k + 1:
        if N % 2 == 0:
            return None
        phi = linalg.solve(hankel(s, k), s[k + 1 : 2 * k + 2], tol)
    else:
        if not is_prg(s, tol):
            return None
        phi = recursion_coefficients(s, tol)
    if not phi:
        return LineMeasure([], [])
    gen = [-c for c in phi] + [1]
    roots = real_roots(gen, tol=tol)
    if roots is None or len(roots) != len(phi):
        return None
    weights = _vandermonde_weights(roots, s, tol)
    return LineMeasure(list(roots), list(weights))


def _unlocalize(gamma, poly, roots_of_poly, nu: LineMeasure, tol) -> Optional[LineMeasure]:
    """Measure mu with poly * mu = nu matching gamma: nu/poly plus masses at the roots of poly."""
    sizes = [len(gamma), len(poly), len(roots_of_poly), len(nu.points)]
    vals = _uniform(list(gamma) + list(poly) + list(roots_of_poly) + nu.points + nu.weights)
    cuts = [sum(sizes[:i]) for i in range(5)]
    gamma, poly, roots_of_poly, npts = (vals[cuts[i] : cuts[i + 1]] for i in range(4))
    nu = LineMeasure(npts, vals[cuts[4] :])
    tol = _tol(vals, tol)
    pts, wts = [], []
    for t, w in zip(nu.points, nu.weights):
        val = poly_eval(poly, t)
        if val == 0 or (tol is not None and abs(val) <= tol):
            return None
        pts.append(t)
        wts.append(w / val)
    if roots_of_poly:
        k = len(roots_of_poly)
        rhs = [gamma[j] - sum((w * t**j for t, w in zip(pts, wts)), 0) for j in range(k)]
        masses = _vandermonde_weights(list(roots_of_poly), rhs, tol)
        for e, m in zip(roots_of_poly, masses):
            if m == 0 or (tol is not None and abs(m) <= tol * max(1, abs(gamma[0]))):
                continue
            pts.append(e)
            wts.append(m)
    return LineMeasure(pts, wts)


def certify_line_measure(mu: LineMeasure, gamma, support: Support, tol=None) -> bool:
    g = _seq(gamma)
    tol = _tol(list(g) + mu.points + mu.weights, tol)
    if any((w <= 0) for w in mu.weights):
        return False
    if not all(support.contains(t, tol) for t in mu.points):
        return False
    got = mu.moments(len(g) - 1)
    if tol is None:
        mu.residual = max((abs(a - b) for a, b in zip(got, g)), default=0)
        return mu.residual == 0
    mu.residual = max(
        (abs(_num(a) - _num(b)) / max(1, abs(_num(b))) for a, b in zip(got, g)),
        default=NUM.mpf(0),
    )
    return mu.residual <= RESIDUAL_TOL


def construct_measure(gamma, support: Support, extra_sequences=(), tol=None) -> Optional[LineMeasure]:
    """A certified finitely atomic measure for gamma on the support, by localized flattening.

    For each localizer L that is nonnegative on the support, L(E) gamma is
    flattened, divided back by L, and completed by point masses at the
    roots of L.  The first candidate that certifies wins.
    """
    g = list(_seq(gamma))
    tol = _tol(g + [support.origin, support.c or 0, support.d or 0], tol)
    e = support.origin
    roots = {"plain": [], "halfline": [e]}
    if support.c is not None:
        roots["outer"] = [support.c, support.d]
        roots["union"] = [e, support.c, support.d]
    locs = support.localizers()
    for data in [g] + [list(x) for x in extra_sequences]:
        for name in ("plain", "halfline", "outer", "union"):
            if name not in locs:
                continue
            L = locs[name]
            if len(L) - 1 > len(data) - 1:
                continue
            nu = flatten(localize(data, L), tol)
            if nu is None:
                continue
            mu = _unlocalize(data, L, roots[name], nu, tol)
            if mu is None:
                continue
            order = sorted(range(len(mu.points)), key=lambda i: float(to_mpf(mu.points[i])))
            mu = LineMeasure([mu.points[i] for i in order], [mu.weights[i] for i in order])
            if certify_line_measure(mu, g, support, tol):
                mu.notes.append(f"constructed by flattening the {name}-localized sequence")
                return mu
    return None


# --- solvers -----------------------------------------------------------------


@dataclass
class UnivariateSolution:
    status: str  # "measure-exists" | "no-measure"
    case: Optional[str] = None  # "all-pd" | "singular-H-branch"
    extension: list = field(default_factory=list)
    measure: Optional[LineMeasure] = None
    support: Optional[Support] = None
    checks: dict = field(default_factory=dict)
    first_non_pd: Optional[str] = None
    notes: list = field(default_factory=list)

    @property
    def exists(self) -> bool:
        return self.status == "measure-exists"

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "case": self.case,
            "support": None if self.support is None else self.support.to_json(),
            "checks": dict(self.checks),
            "first_non_pd": self.first_non_pd,
            "extension_moments": [scalar_to_json(x) for x in self.extension],
            "measure": None if self.measure is None else self.measure.to_json(),
            "notes": list(self.notes),
        }


def solve_halfline(gamma, origin=0, tol=None) -> UnivariateSolution:
    """Existence and construction of a measure on [origin, oo) (Stieltjes conditions by parity)."""
    g = list(_seq(gamma))
    support = Support(origin)
    tol = _tol(g + [origin], tol)
    N = len(g) - 1
    sets = HankelSet.build(g, support)
    loc = support.localizers()["halfline"]
    checks = {}
    if N % 2 == 0:
        k = N // 2
        Hpos = sets.Hpos
        checks["H_psd"] = linalg.is_psd(sets.H, tol)
        checks["Hpos_psd"] = linalg.is_psd(Hpos, tol)
        s = localize(g, loc)
        vec = s[k : 2 * k]
        checks["range"] = Hpos.dim == 0 or linalg.in_column_space(Hpos, vec, tol)
        bound = k + 1
    else:
        k = (N - 1) // 2
        checks["H_psd"] = linalg.is_psd(sets.H, tol)
        checks["Hpos_psd"] = linalg.is_psd(sets.Hpos, tol)
        checks["range"] = linalg.in_column_space(sets.H, g[k + 1 : 2 * k + 2], tol)
        bound = k + 1
    sol = UnivariateSolution("no-measure", support=support, checks=checks)
    if not all(checks.values()):
        return sol
    sol.status = "measure-exists"
    sol.case = "all-pd" if linalg.is_pd(sets.H, tol) else "singular-H-branch"
    sol.measure = construct_measure(g, support, tol=tol)
    if sol.measure is None:
        sol.notes.append("conditions hold but no candidate measure certified")
    elif len(sol.measure) > bound:
        sol.notes.append(f"measure has {len(sol.measure)} atoms, above the bound {bound}")
    return sol


def _corner_threshold(gamma_known, poly, r, tol):
    """For the matrix at index r whose corner holds the unknown gamma_r: the least admissible gamma_r."""
    probe = list(gamma_known) + [0]
    M = hankel_by_index(probe, r, poly)
    A = [list(row[:-1]) for row in M.rows()[:-1]]
    h = [row[-1] for row in M.rows()[:-1]]
    known = M.rows()[-1][-1]
    lead = poly[-1]
    z = linalg.schur_threshold(A, h, tol) if A else 0
    return (z - known) / lead


def solve_union(gamma, c, d, origin=0, tol=None) -> UnivariateSolution:
    """Existence and construction of a measure on [origin, c] U [d, oo)."""
    g = list(_seq(gamma))
    support = Support(origin, c, d)
    tol = _tol(g + [origin, c, d], tol)
    if not (origin < c < d):
        raise ValueError("need origin < c < d")
    N = len(g) - 1
    even = N % 2 == 0
    locs = support.localizers()
    sets = HankelSet.build(g, support)
    named = sets.named()
    checks = {f"{name}_psd": linalg.is_psd(M, tol) for name, M in named}
    sol = UnivariateSolution("no-measure", support=support, checks=checks)
    if not all(checks.values()):
        return sol

    pd = {name: linalg.is_pd(M, tol) for name, M in named}
    if all(pd.values()):
        sol.case = "all-pd"
        ext = _case_a_extension(g, locs, even, tol)
    else:
        sol.case = "singular-H-branch"
        first = next(name for name, _ in named if not pd[name])
        sol.first_non_pd = first
        if even and first not in ("plain", "outer"):
            sol.notes.append(f"first non-definite matrix is the {first} one; excluded for even top index")
            return sol
        ext = _case_b_extension(g, locs[first], 2 if even else 1, tol)
        if ext is None:
            sol.notes.append(f"the {first}-localized sequence is not positively recursively generated")
            return sol
        if not even and first not in ("plain", "outer"):
            sol.notes.append(
                f"odd top index with first non-definite matrix {first}: an even-style restriction would reject"
            )
    sol.extension = ext
    gext = g + ext
    ext_sets = HankelSet.build(gext, support)
    ext_named = ext_sets.named() if even else [(n_, M) for n_, M in ext_sets.named() if n_ in ("plain", "outer")]
    for name, M in ext_named:
        sol.checks[f"extended_{name}_psd"] = linalg.is_psd(M, tol)
    if not all(sol.checks.values()):
        return sol
    sol.status = "measure-exists"
    sol.measure = construct_measure(g, support, extra_sequences=[gext], tol=tol)
    if sol.measure is None:
        sol.notes.append("conditions hold but no candidate measure certified")
    return sol


def _case_a_extension(g, locs, even, tol):
    """Extension moments set to (exact psd threshold) + 1, one variable at a time."""
    N = len(g) - 1
    if even:
        x = max(
            _corner_threshold(g, locs["halfline"], N + 1, tol),
            _corner_threshold(g, locs["union"], N + 1, tol),
        ) + 1
        y = max(
            _corner_threshold(g + [x], locs["plain"], N + 2, tol),
            _corner_threshold(g + [x], locs["outer"], N + 2, tol),
        ) + 1
        return [x, y]
    x = max(
        _corner_threshold(g, locs["plain"], N + 1, tol),
        _corner_threshold(g, locs["outer"], N + 1, tol),
    ) + 1
    return [x]


def _case_b_extension(g, poly, count, tol):
    """Continue the localized sequence of the singular matrix and translate back to gamma."""
    new_s = continue_sequence(localize(g, poly), count, tol)
    if new_s is None:
        return None
    deg = len(poly) - 1
    gext = list(g)
    for v in new_s:
        t = len(gext) - deg
        known = sum((poly[i] * gext[t + i] for i in range(deg)), 0)
        gext.append((v - known) / poly[-1])
    return gext[len(g) :]
