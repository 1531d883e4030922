"""The quadratic R(theta) and flat extensions M(n+1) of a p-pure M(n).

Only three degree-(2n+1) moments of an extension are free:
``theta = beta_{2,2n-1}``, ``phi = beta_{1,2n}`` and ``psi = beta_{0,2n+1}``.
Matching the moment structure forces ``phi = phi*(theta)`` and
``psi = psi*(theta, phi)``; the last identity leaves ``R(theta) = 0`` with
``R`` of degree at most two.  Each real root gives a flat extension.

The coefficients are computed from the block inverse of ``[M(n)]_B``
(``compute_R``); ``evaluate_R_direct`` evaluates the defining quadratic
forms with the full inverse and serves as an independent check.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from . import linalg
from .exact import QuadExt, rational_sqrt, sign
from .linalg import SymMatrix
from .moments import (
    BivariateMoments,
    CurveParams,
    basis_B,
    monomial_label,
    monomials,
)


class InconsistencyError(RuntimeError):
    """An identity that holds for every pure psd input failed: an implementation bug."""


@dataclass
class CompressedData:
    n: int
    curve: CurveParams
    beta: BivariateMoments
    ext: dict
    basis: list
    MB: SymMatrix
    MB_inv: list
    M: list
    x: list
    corner: object
    eps: object
    v: list
    P: list
    Q_block: list
    u: list
    P_corner: object
    w: list
    q: list
    p: list

    @property
    def recursive_moments(self) -> dict:
        top = 2 * self.n + 1
        return {ij: val for ij, val in self.ext.items() if sum(ij) == top}


@dataclass
class RThetaPoly:
    R2: Fraction
    R1: Fraction
    R0: Fraction
    Delta: Fraction
    f: tuple = ()
    j: dict = field(default_factory=dict)
    k: dict = field(default_factory=dict)
    l: dict = field(default_factory=dict)
    k_poly: tuple = ()
    l_poly: tuple = ()

    def __call__(self, theta):
        return (self.R2 * theta + self.R1) * theta + self.R0

    @property
    def coefficients(self) -> tuple:
        return (self.R0, self.R1, self.R2)

    def is_zero(self) -> bool:
        return self.R2 == 0 and self.R1 == 0 and self.R0 == 0


@dataclass
class RootSet:
    kind: str  # "no-root" | "single" | "double" | "two" | "identically-zero"
    roots: tuple = ()
    branches: tuple = ()

    @property
    def has_root(self) -> bool:
        return self.kind != "no-root"


@dataclass
class FlatExtension:
    theta: object
    phi: object
    psi: object
    Bblock: list
    Chat: SymMatrix
    Mn1: SymMatrix
    multiplicity: str
    moments: BivariateMoments
    checks: dict
    compressed: CompressedData = field(repr=False, default=None)
    branch: str = ""


# --- compression --------------------------------------------------------------


def _extend_recursively(beta: BivariateMoments, curve: CurveParams) -> dict:
    n = beta.n
    ext = dict(beta.values)
    a, b = curve.a, curve.b
    for i in range(2 * n - 1):
        ext[(i + 3, 2 * n - i - 2)] = (
            ext[(i, 2 * n - i)] - a * ext[(i + 1, 2 * n - i - 2)] - b * ext[(i, 2 * n - i - 2)]
        )
    return ext


def compress(M: SymMatrix, beta: BivariateMoments, curve: CurveParams) -> CompressedData:
    """Block data of [M(n)]_B and the fixed parts w, q, p of the three new columns."""
    n = beta.n
    mons = monomials(n)
    if M.dim != len(mons):
        raise ValueError("moment matrix order does not match the moment sequence")
    B = basis_B(n)
    idx = [mons.index(m) for m in B]
    MB = M.submatrix(idx)
    try:
        MB_inv = linalg.invert(MB)
    except linalg.SingularMatrixError as exc:
        raise InconsistencyError("[M(n)]_B is singular although M(n) is pure") from exc
    rows = MB.rows()
    m = len(B) - 1
    Mblk = [r[:m] for r in rows[:m]]
    x = [rows[i][m] for i in range(m)]
    corner = rows[m][m]
    Minv = linalg.invert(Mblk)
    Mx = linalg.matvec(Minv, x)
    eps = 1 / (corner - linalg.dot(x, Mx))
    v = [-eps * t for t in Mx]
    P = [[Minv[i][j] + eps * Mx[i] * Mx[j] for j in range(m)] for i in range(m)]
    # the block formulas must reproduce the directly computed inverse
    if eps != MB_inv[m][m] or v != [MB_inv[i][m] for i in range(m)] or any(
        P[i][j] != MB_inv[i][j] for i in range(m) for j in range(m)
    ):
        raise InconsistencyError("block inverse disagrees with the direct inverse")

    ext = _extend_recursively(beta, curve)
    w = [ext[(i + 2, j + n - 1)] for (i, j) in B[:-1]]
    q = [ext[(i + 1, j + n)] for (i, j) in B[:-2]]
    p = [ext[(i, j + n + 1)] for (i, j) in B[:-3]]
    return CompressedData(
        n=n,
        curve=curve,
        beta=beta,
        ext=ext,
        basis=B,
        MB=MB,
        MB_inv=MB_inv,
        M=Mblk,
        x=x,
        corner=corner,
        eps=eps,
        v=v,
        P=P,
        Q_block=[r[: m - 1] for r in P[: m - 1]],
        u=[P[i][m - 1] for i in range(m - 1)],
        P_corner=P[m - 1][m - 1],
        w=w,
        q=q,
        p=p,
    )


# --- the quadratic R(theta) ---------------------------------------------------


def _padd(*polys):
    size = max(len(p) for p in polys)
    return [sum((p[i] if i < len(p) else 0) for p in polys) for i in range(size)]


def _pmul(p, q):
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] = out[i + j] + a * b
    return out


def _pscale(p, c):
    return [c * t for t in p]


def compute_R(cd: CompressedData) -> RThetaPoly:
    """Coefficients of R(theta) via the block-inverse expansion, with the degree-collapse asserted."""
    n, beta = cd.n, cd.beta
    a, b = cd.curve.a, cd.curve.b
    m = 3 * n - 1  # length of w and v
    eps, v, P, w, q, p = cd.eps, cd.v, cd.P, cd.w, cd.q, cd.p
    rw = [linalg.dot(P[i], w) for i in range(m)]
    vw = linalg.dot(v, w)

    f2 = eps
    f1 = 2 * vw
    f0 = linalg.dot(rw, w) + a * beta[(2, 2 * n - 2)] + b * beta[(1, 2 * n - 2)]
    phi_poly = [f0, f1, f2]

    j = {
        "11": eps,
        "10": vw,
        "02": v[m - 1],
        "01": rw[m - 1] + linalg.dot(v[: m - 1], q),
        "00": linalg.dot(q, rw[: m - 1]) + a * beta[(1, 2 * n - 1)] + b * beta[(0, 2 * n - 1)],
    }
    # psi*(theta, phi*(theta)) = j3 t^3 + j2 t^2 + j1 t + j0
    j["3"] = j["11"] * f2
    j["2"] = j["11"] * f1 + j["10"] * f2 + j["02"]
    j["1"] = j["11"] * f0 + j["10"] * f1 + j["01"]
    j["0"] = j["10"] * f0 + j["00"]
    psi_poly = [j["0"], j["1"], j["2"], j["3"]]

    k = {
        "101": eps,
        "100": vw,
        "011": v[m - 1],
        "010": rw[m - 1],
        "002": v[m - 2],
        "001": rw[m - 2] + linalg.dot(v[: m - 2], p),
        "000": linalg.dot(rw[: m - 2], p),
    }
    theta = [0, 1]
    k_poly = _padd(
        _pscale(_pmul(theta, psi_poly), k["101"]),
        _pscale(psi_poly, k["100"]),
        _pscale(_pmul(theta, phi_poly), k["011"]),
        _pscale(phi_poly, k["010"]),
        [k["000"], k["001"], k["002"]],
    )

    l = {
        "20": eps,
        "11": 2 * v[m - 1],
        "10": 2 * linalg.dot(v[: m - 1], q),
        "02": cd.P_corner,
        "01": 2 * linalg.dot(cd.u, q),
        "00": linalg.dot(q, linalg.matvec(cd.Q_block, q)),
    }
    l_poly = _padd(
        _pscale(_pmul(phi_poly, phi_poly), l["20"]),
        _pscale(_pmul(theta, phi_poly), l["11"]),
        _pscale(phi_poly, l["10"]),
        [l["00"], l["01"], l["02"]],
    )
    k_poly = _padd(k_poly, [0] * 5)
    l_poly = _padd(l_poly, [0] * 5)
    if k_poly[4] != l_poly[4] or k_poly[3] != l_poly[3]:
        raise InconsistencyError(
            "degree collapse failed: quartic/cubic terms of R(theta) do not cancel"
        )
    R0, R1, R2 = (k_poly[i] - l_poly[i] for i in range(3))
    return RThetaPoly(
        R2=R2,
        R1=R1,
        R0=R0,
        Delta=R1 * R1 - 4 * R0 * R2,
        f=(f0, f1, f2),
        j=j,
        k=k,
        l=l,
        k_poly=tuple(k_poly),
        l_poly=tuple(l_poly),
    )


def phi_star(cd: CompressedData, theta):
    n, a, b = cd.n, cd.curve.a, cd.curve.b
    col = cd.w + [theta]
    return linalg.dot(col, linalg.matvec(cd.MB_inv, col)) + a * cd.beta[(2, 2 * n - 2)] + b * cd.beta[(1, 2 * n - 2)]


def psi_star(cd: CompressedData, theta, phi):
    n, a, b = cd.n, cd.curve.a, cd.curve.b
    c = linalg.matvec(cd.MB_inv, cd.w + [theta])
    return linalg.dot(cd.q + [theta, phi], c) + a * cd.beta[(1, 2 * n - 1)] + b * cd.beta[(0, 2 * n - 1)]


def Q_form(cd: CompressedData, theta, phi, psi):
    c = linalg.matvec(cd.MB_inv, cd.w + [theta])
    colq = cd.q + [theta, phi]
    d = linalg.matvec(cd.MB_inv, colq)
    return linalg.dot(cd.p + [theta, phi, psi], c) - linalg.dot(colq, d)


def evaluate_R_direct(cd: CompressedData, theta):
    """R(theta) = Q(theta, phi*(theta), psi*(theta, phi*(theta))) from the full inverse."""
    phi = phi_star(cd, theta)
    return Q_form(cd, theta, phi, psi_star(cd, theta, phi))


# --- roots --------------------------------------------------------------------


def solve_R(R: RThetaPoly) -> RootSet:
    """Real roots of R, exact in Q or Q(sqrt Delta)."""
    R2, R1, R0 = R.R2, R.R1, R.R0
    if R2 == 0:
        if R1 != 0:
            return RootSet("single", (QuadExt(-R0 / R1),), ("linear",))
        if R0 == 0:
            return RootSet("identically-zero", (QuadExt(0),), ("any",))
        return RootSet("no-root")
    D = R.Delta
    if D < 0:
        return RootSet("no-root")
    if D == 0:
        return RootSet("double", (QuadExt(-R1 / (2 * R2)),), ("double",))
    root = rational_sqrt(D)
    if root is not None:
        lo = QuadExt((-R1 - root) / (2 * R2))
        hi = QuadExt((-R1 + root) / (2 * R2))
    else:
        lo = QuadExt(-R1 / (2 * R2), Fraction(-1) / (2 * R2), D)
        hi = QuadExt(-R1 / (2 * R2), Fraction(1) / (2 * R2), D)
    return RootSet("two", (lo, hi), ("minus", "plus"))


def default_root(roots: RootSet):
    """Smaller |theta|; ties go to the minus-sqrt(Delta) branch."""
    if not roots.roots:
        return None
    if len(roots.roots) == 1:
        return roots.roots[0], roots.branches[0]
    (t0, b0), (t1, b1) = zip(roots.roots, roots.branches)
    s = sign(abs(t1) - abs(t0))
    return (t1, b1) if s < 0 else (t0, b0)


# --- building M(n+1) ----------------------------------------------------------


def build_flat_extension(
    cd: CompressedData, theta, multiplicity: str = "unique", branch: str = ""
) -> FlatExtension:
    """Assemble B(n+1), C-hat and M(n+1) at a root and re-verify every claimed identity."""
    n, a, b = cd.n, cd.curve.a, cd.curve.b
    beta = cd.beta
    theta = theta if isinstance(theta, QuadExt) else QuadExt(theta)
    phi = phi_star(cd, theta)
    psi = psi_star(cd, theta, phi)

    ext = dict(cd.ext)
    ext[(2, 2 * n - 1)] = theta
    ext[(1, 2 * n)] = phi
    ext[(0, 2 * n + 1)] = psi

    rows_mon = monomials(n)
    cols_mon = [(n + 1 - l, l) for l in range(n + 2)]
    Bfull = [[ext[(i + k, j + l)] for (k, l) in cols_mon] for (i, j) in rows_mon]
    bidx = [rows_mon.index(m) for m in cd.basis]
    BB = [Bfull[r] for r in bidx]
    MinvBB = linalg.matmul(cd.MB_inv, BB)
    Chat = linalg.matmul(linalg.transpose(BB), MinvBB)

    checks = {}
    Mrows = [[beta[(i + k, j + l)] for (k, l) in rows_mon] for (i, j) in rows_mon]
    MxB = [[r[c] for c in bidx] for r in Mrows]
    checks["column_space"] = linalg.matmul(MxB, MinvBB) == Bfull

    L = {"X3": n - 2, "X2": n - 1, "X1": n, "X0": n + 1}
    checks["phi_corner"] = (
        Chat[L["X1"]][L["X3"]] == phi - a * beta[(2, 2 * n - 2)] - b * beta[(1, 2 * n - 2)]
    )
    checks["psi_corner"] = (
        Chat[L["X0"]][L["X3"]] == psi - a * beta[(1, 2 * n - 1)] - b * beta[(0, 2 * n - 1)]
    )
    checks["hankel_x2x2"] = Chat[L["X2"]][L["X2"]] == Chat[L["X1"]][L["X3"]]
    checks["hankel_x1x2"] = Chat[L["X1"]][L["X2"]] == Chat[L["X0"]][L["X3"]]
    checks["hankel_x1x1"] = Chat[L["X1"]][L["X1"]] == Chat[L["X0"]][L["X2"]]

    # C-hat must be Hankel-like: entry depends only on the product monomial
    top = {}
    structured = True
    for r in range(n + 2):
        for c in range(n + 2):
            key = r + c
            if key in top:
                structured = structured and top[key] == Chat[r][c]
            else:
                top[key] = Chat[r][c]
    checks["moment_structure"] = structured

    labels = tuple(monomial_label(m) for m in rows_mon + cols_mon)
    full = [Mrows[i] + Bfull[i] for i in range(len(rows_mon))]
    full += [[Bfull[i][c] for i in range(len(rows_mon))] + Chat[c] for c in range(n + 2)]
    Mn1 = SymMatrix(tuple(map(tuple, full)), labels)
    rk = linalg.rank(Mn1)
    checks["flat"] = rk == 3 * n
    checks["psd"] = linalg.is_psd(Mn1)

    failed = [name for name, ok in checks.items() if not ok]
    if failed:
        raise InconsistencyError(f"flat extension verification failed: {failed}")

    vals = dict(ext)
    for s, val in top.items():
        vals[(2 * n + 2 - s, s)] = val
    moments = BivariateMoments(2 * n + 2, vals)
    return FlatExtension(
        theta=theta,
        phi=phi,
        psi=psi,
        Bblock=Bfull,
        Chat=SymMatrix(tuple(map(tuple, Chat)), tuple(monomial_label(m) for m in cols_mon)),
        Mn1=Mn1,
        multiplicity=multiplicity,
        moments=moments,
        checks=checks,
        compressed=cd,
        branch=branch,
    )


def flat_extensions(cd: CompressedData, roots: RootSet) -> list:
    """One verified flat extension per real root (theta = 0 when R vanishes identically)."""
    if not roots.has_root:
        return []
    mult = {"two": "one-of-two", "identically-zero": "infinitely-many"}.get(roots.kind, "unique")
    return [
        build_flat_extension(cd, t, mult, br) for t, br in zip(roots.roots, roots.branches)
    ]
