"""Solve a symmetric problem on y^2 = x^3 - x by reducing it to one variable.

Symmetric data (every moment with odd y-power is zero) only see y^2, so
the problem becomes a univariate one on {x : x^3 - x >= 0} = [-1, 0] U [1, oo).
The solution is lifted back by splitting each atom x into (x, +-sqrt(x^3 - x)).

    python demos/symmetric_pipeline.py
"""

from fractions import Fraction

from tmpkit import formats
from tmpkit.moments import BivariateMoments, CurveParams
from tmpkit.symmetric import cubic_real_roots, reduce, solve_symmetric

curve = CurveParams(-1, 0)
obj = formats.generate(curve, atoms=6, seed=3, symmetric=True)
beta, _, _ = formats.parse_moments(formats.dumps(obj))

print("generating atoms:")
for atom in obj["generator"]["atoms"]:
    print("   ", atom)

roots = cubic_real_roots(curve.a, curve.b)
print("\nroots of x^3 - x:", [str(r) for r in roots.roots])

red = reduce(beta, curve)
print("univariate moments gamma_0..gamma_9:")
print("   ", [str(g) for g in red.gamma])
print("support:", red.support)

sol = solve_symmetric(beta, curve)
uni = sol.univariate
print(f"\nunivariate verdict: {uni.status} ({uni.case})")
for name, ok in uni.checks.items():
    print(f"    {name:28} {ok}")
print("univariate atoms:", [str(t) for t in uni.measure.points])

print("\nlifted measure:")
for (x, y), w in zip(sol.measure.atoms, sol.measure.weights):
    print(f"    x = {str(x):6} y = {y!s:28} weight {w}")
print("reproduces every moment exactly:", sol.measure.moments(6) == beta.values)

# add symmetric mass at x = 1/2, inside the gap (0, 1) where y^2 < 0
gap = {ij: v for ij, v in beta.values.items()}
half = Fraction(1, 2)
for (i, j) in gap:
    if j % 2 == 0:
        gap[(i, j)] += half**i * curve.cubic(half) ** (j // 2)
print("\nadding a mass at x = 1/2 (where y^2 < 0):", solve_symmetric(BivariateMoments(6, gap), curve).status)
