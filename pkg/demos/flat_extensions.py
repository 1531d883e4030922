"""Walk through the flat-extension test on the three bundled data sets.

For pure data on a cubic curve the question "is there a representing
measure with exactly rank M(n) atoms?" comes down to whether one quadratic
R(theta) has a real root.  This script prints each step.

    python demos/flat_extensions.py
"""

import mpmath

from tmpkit import formats
from tmpkit.exact import scalar_to_json
from tmpkit.extract import extract_measure
from tmpkit.flat_ext import compress, compute_R, flat_extensions, solve_R
from tmpkit.moments import build_moment_matrix, check_p_pure


def short(q, width=60):
    s = str(scalar_to_json(q))
    return s if len(s) <= width else s[: width // 2] + "..." + s[-width // 2 :]


for name in formats.FIXTURES:
    beta, curve, _ = formats.load_fixture(name)
    print(f"== {name}: y^2 = x^3 + ({curve.a}) x + ({curve.b}), n = {beta.n}")

    M = build_moment_matrix(beta)
    purity = check_p_pure(M, curve)
    print(f"   M({beta.n}) is {M.dim}x{M.dim}, rank {purity.rank}, pure: {purity.is_pure}")

    cd = compress(M, beta, curve)
    R = compute_R(cd)
    print(f"   R2 = {short(R.R2)}")
    print(f"   R1 = {short(R.R1)}")
    print(f"   R0 = {short(R.R0)}")
    roots = solve_R(R)
    print(f"   roots: {roots.kind}")

    if not roots.has_root:
        print("   -> no measure with rank M(n) atoms\n")
        continue

    for fe in flat_extensions(cd, roots):
        mu = extract_measure(fe)
        print(f"   theta = {short(fe.theta)} gives a flat M({beta.n + 1}); {len(mu)} atoms:")
        for (x, y), w in zip(mu.atoms, mu.weights):
            print(f"      ({mpmath.nstr(x, 12):>16}, {mpmath.nstr(y, 12):>16})  weight {mpmath.nstr(w, 12)}")
        print(f"   moment residual {mpmath.nstr(mu.residual_moments, 3)}\n")
