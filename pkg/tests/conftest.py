import random
from fractions import Fraction

import pytest

from tmpkit import formats
from tmpkit.moments import CurveParams, moments_from_atoms

CUSP = CurveParams(0, 0)


def distinct_rationals(rng, k, lo=-5, hi=5, den=6, exclude=()):
    out = set()
    while len(out) < k:
        q = Fraction(rng.randint(lo * den, hi * den), rng.randint(1, den))
        if q not in exclude:
            out.add(q)
    return sorted(out)


def cusp_measure(seed, k=9, n=3, unit=False):
    """k rational atoms (t^2, t^3) on y^2 = x^3 and their moments up to degree 2n."""
    rng = random.Random(seed)
    ts = distinct_rationals(rng, k)
    atoms = [(t * t, t**3) for t in ts]
    weights = [Fraction(1) if unit else Fraction(rng.randint(1, 9), rng.randint(1, 5)) for _ in ts]
    return atoms, weights, moments_from_atoms(atoms, weights, 2 * n)


@pytest.fixture(scope="session")
def fixtures():
    return {name: formats.load_fixture(name) for name in formats.FIXTURES + formats.SYMMETRIC_FIXTURES}
