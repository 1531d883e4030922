"""Univariate moment problems on [0, oo) and on [0, c] U [d, oo).

Shows the checks the solvers run, the singular extension step, and how much
freedom the top new moment really has.

    python demos/univariate_supports.py
"""

from fractions import Fraction

from tmpkit import linalg
from tmpkit.univariate import LineMeasure, extend_singular, hankel, solve_halfline, solve_union


def moments(points, weights, N):
    return LineMeasure(points, weights).moments(N)


print("-- half-line, three atoms, 9 moments")
g = moments([Fraction(1, 2), 2, 5], [1, 3, 2], 9)
sol = solve_halfline(g)
print("   ", sol.status, sol.case, sol.checks)
print("    atoms", [str(t) for t in sol.measure.points], "weights", [str(w) for w in sol.measure.weights])

print("\n-- negative first moment")
print("   ", solve_halfline([1, -1, 2, -1, 5]).status)

print("\n-- union [0, 1] U [2, oo): atoms on both pieces")
g = moments([0, Fraction(1, 2), 3, 7], [1, 1, 2, 1], 9)
sol = solve_union(g, 1, 2)
print("   ", sol.status, sol.case, "first non-definite:", sol.first_non_pd)
print("    extension", [str(x) for x in sol.extension])
print("    atoms", [str(t) for t in sol.measure.points])

print("\n-- same atoms plus one inside the gap")
g = moments([0, Fraction(3, 2), 3, 7], [1, 1, 2, 1], 9)
sol = solve_union(g, 1, 2)
print("   ", sol.status, {k: v for k, v in sol.checks.items() if not v})

print("\n-- singular extension")
g = moments([Fraction(1, 2), 3], [1, 2], 4)
new = extend_singular(g)
print("    gamma", [str(x) for x in g], "-> next four", [str(x) for x in new])
ext = g + new
for idx, label in enumerate(["gamma_5", "gamma_6", "gamma_7", "gamma_8"]):
    verdicts = []
    for s in (1, -1):
        bumped = list(ext)
        bumped[5 + idx] += s * Fraction(1, 10**6)
        verdicts.append("psd" if linalg.is_psd(hankel(bumped, 4)) else "not psd")
    print(f"    {label} +1e-6: {verdicts[0]:8} -1e-6: {verdicts[1]}")
print("    the first three are pinned; the last is only bounded below")
