"""End-to-end solves that produce machine-readable reports and exit codes.

Exit codes: 0 a measure was found and certified, 2 certified that no
(rank-3n) measure exists, 3 invalid input or data that are not pure.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import mpmath

from .exact import scalar_to_json, sign
from .extract import DEFAULT_PRECISION, DEFAULT_TOLERANCE, CertificationError, ExtractionError, extract_measure
from .flat_ext import compress, compute_R, default_root, flat_extensions, solve_R
from .moments import BivariateMoments, CurveParams, DegenerateInputError, build_moment_matrix, check_p_pure

EXIT_FOUND = 0
EXIT_INTERNAL = 1
EXIT_NONE = 2
EXIT_INVALID = 3

CONCLUSIONS = {
    "no-root": "no-rank-3n-measure",
    "single": "unique",
    "double": "unique",
    "two": "two-measures",
    "identically-zero": "infinitely-many",
}


@dataclass
class Options:
    precision_bits: int = DEFAULT_PRECISION
    tolerance: object = DEFAULT_TOLERANCE
    root_branch: str = "auto"  # auto | minus | plus | both
    mode: str = "auto"  # exact | numeric | auto
    timing: bool = False
    seed: int = 0

    def to_json(self) -> dict:
        return {
            "mode": self.mode,
            "precision_bits": self.precision_bits,
            "tolerance": mpmath.nstr(mpmath.mpf(self.tolerance), 6),
            "root_branch": self.root_branch,
        }


@dataclass
class Report:
    data: dict
    exit_code: int
    log: list = field(default_factory=list)


def purity_json(pr) -> dict:
    return {
        "psd": pr.psd,
        "rank": pr.rank,
        "curve_relation_holds": pr.curve_relation_holds,
        "basis_invertible": pr.basis_invertible,
        "kernel_dim": pr.kernel_dim,
        "expected_kernel_dim": pr.expected_kernel_dim,
        "failures": list(pr.failures),
        "offending_kernel_vector": None
        if pr.offending_kernel_vector is None
        else [scalar_to_json(x) for x in pr.offending_kernel_vector],
    }


def _header(input_digest, beta, curve, opts) -> dict:
    return {
        "input": {
            "sha256": input_digest,
            "n": beta.n,
            "a": scalar_to_json(curve.a),
            "b": scalar_to_json(curve.b),
        },
        "options": opts.to_json(),
    }


def _selected(fes, roots, branch):
    if not fes:
        return []
    if branch == "both" or len(fes) == 1:
        return list(fes)
    if branch in ("minus", "plus"):
        return [fe for fe in fes if fe.branch == branch]
    theta, br = default_root(roots)
    return [fe for fe in fes if fe.branch == br]


def analyze(beta: BivariateMoments, curve: CurveParams, opts: Options = None, input_digest: str = "") -> Report:
    """Purity, R(theta), its roots, the flat extension(s) and the extracted measure(s)."""
    opts = opts or Options()
    start = time.perf_counter()
    out = _header(input_digest, beta, curve, opts)
    log = []
    if beta.is_zero():
        out["error"] = "degenerate input: every moment is zero"
        return Report(out, EXIT_INVALID, ["all moments vanish; nothing to solve"])
    pr = check_p_pure(build_moment_matrix(beta), curve)
    out["pure"] = pr.is_pure
    out["rank"] = pr.rank
    out["purity"] = purity_json(pr)
    if not pr.is_pure:
        out["conclusion"] = "not-pure"
        log.append("moment matrix is not p-pure: " + "; ".join(pr.failures))
        return _finish(out, EXIT_INVALID, log, opts, start)

    cd = compress(build_moment_matrix(beta), beta, curve)
    R = compute_R(cd)
    roots = solve_R(R)
    out["R"] = {
        "R2": scalar_to_json(R.R2),
        "R1": scalar_to_json(R.R1),
        "R0": scalar_to_json(R.R0),
        "Delta": scalar_to_json(R.Delta),
    }
    out["delta_sign"] = sign(R.Delta)
    out["root_kind"] = roots.kind
    out["roots"] = [{"theta": scalar_to_json(t), "branch": br} for t, br in zip(roots.roots, roots.branches)]
    out["conclusion"] = CONCLUSIONS[roots.kind]
    log.append(f"R(theta) = ({R.R2}) theta^2 + ({R.R1}) theta + ({R.R0}); {roots.kind}")
    if not roots.has_root:
        log.append("R has no real root: no rank-3n representing measure")
        return _finish(out, EXIT_NONE, log, opts, start)

    fes = flat_extensions(cd, roots)
    chosen = _selected(fes, roots, opts.root_branch)
    out["flat_extensions"] = [
        {
            "theta": scalar_to_json(fe.theta),
            "phi": scalar_to_json(fe.phi),
            "psi": scalar_to_json(fe.psi),
            "branch": fe.branch,
            "multiplicity": fe.multiplicity,
            "selected": fe in chosen,
        }
        for fe in fes
    ]
    out["flat_extension"] = next(x for x in out["flat_extensions"] if x["selected"])
    measures = []
    code = EXIT_FOUND
    for fe in chosen:
        try:
            mu = extract_measure(fe, opts.precision_bits, opts.tolerance, opts.seed)
            entry = {"branch": fe.branch, "atoms_count": len(mu), **mu.to_json()}
            log.append(f"extracted {len(mu)} atoms (branch {fe.branch}), residual {entry['residual_moments']}")
        except (ExtractionError, CertificationError) as err:
            entry = {"branch": fe.branch, "error": str(err)}
            log.append(f"extraction failed on branch {fe.branch}: {err}")
            code = EXIT_INTERNAL
        measures.append(entry)
    out["measures"] = measures
    return _finish(out, code, log, opts, start)


def symmetric(beta: BivariateMoments, curve: CurveParams, opts: Options = None, input_digest: str = "") -> Report:
    """The symmetric solver with its univariate sub-report."""
    from .symmetric import NotOnCurveError, NotSymmetricError, solve_symmetric

    opts = opts or Options()
    start = time.perf_counter()
    out = _header(input_digest, beta, curve, opts)
    out["symmetric"] = beta.is_symmetric()
    log = []
    if beta.is_zero():
        out["error"] = "degenerate input: every moment is zero"
        return Report(out, EXIT_INVALID, ["all moments vanish; nothing to solve"])
    try:
        sol = solve_symmetric(beta, curve, mode=opts.mode)
    except (NotSymmetricError, NotOnCurveError, DegenerateInputError, ValueError) as err:
        out["error"] = str(err)
        return _finish(out, EXIT_INVALID, [str(err)], opts, start)
    red = sol.reduction
    if sol.purity is not None:
        out["pure"] = sol.purity.is_pure
        out["purity"] = purity_json(sol.purity)
    out["mode"] = sol.mode
    out["cubic_roots"] = red.roots.to_json()
    out["univariate"] = {
        "N": len(red.gamma) - 1,
        "gamma": [scalar_to_json(g) for g in red.gamma],
        "gamma_shifted": [scalar_to_json(g) for g in red.gamma_tilde],
        "support": red.shifted.to_json(),
        "solution": sol.univariate.to_json(),
    }
    out["status"] = sol.status
    out["measure"] = None if sol.measure is None else sol.measure.to_json()
    out["notes"] = list(sol.notes)
    log += sol.notes
    if not sol.exists:
        log.append("no representing measure")
        return _finish(out, EXIT_NONE, log, opts, start)
    if sol.measure is None:
        log.append("conditions hold but the measure could not be constructed")
        return _finish(out, EXIT_INTERNAL, log, opts, start)
    log.append(f"lifted measure with {len(sol.measure)} atoms")
    return _finish(out, EXIT_FOUND, log, opts, start)


def _finish(out, code, log, opts, start) -> Report:
    out["exit_code"] = code
    if opts.timing:
        out["timing"] = {"seconds": round(time.perf_counter() - start, 4)}
    return Report(out, code, log)
