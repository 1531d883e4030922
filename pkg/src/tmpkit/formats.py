"""Moment files, the instance generator and the bundled fixtures.

A moment file is JSON::

    {"n": 3, "a": "-524287/262144", "b": "1",
     "moments": {"0,0": "10", "1,0": "137/30", ...}}

Every ``beta_ij`` with ``i + j <= 2n`` must be present; nothing defaults to
zero.  Rationals are strings.  ``"symmetric": true`` marks data meant for
the symmetric solver, and ``"generator"`` (written by :func:`generate`)
records the atoms the moments came from.
"""

from __future__ import annotations

import hashlib
import json
import random
from fractions import Fraction
from importlib import resources
from typing import Optional

from .exact import QuadExt, format_rational, parse_rational, scalar_to_json
from .moments import BivariateMoments, CurveParams, monomials, moments_from_atoms


class InputError(ValueError):
    """Malformed moment file; the message names the offending field or line."""


FIXTURES = ("example-1150", "example-1046", "example-2031")
SYMMETRIC_FIXTURES = ("symmetric-x3-minus-x", "symmetric-halfline")


def digest(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def _field(obj, key, where="top level"):
    if key not in obj:
        raise InputError(f"missing field {key!r} at {where}")
    return obj[key]


def _rational(value, where: str) -> Fraction:
    if isinstance(value, bool) or isinstance(value, float):
        raise InputError(f"{where}: rationals must be strings or integers, got {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if not isinstance(value, str):
        raise InputError(f"{where}: expected a rational string, got {type(value).__name__}")
    try:
        return parse_rational(value)
    except (ValueError, ZeroDivisionError) as err:
        raise InputError(f"{where}: cannot parse {value!r} as a rational ({err})") from None


def parse_moments(text: str):
    """(BivariateMoments, CurveParams, raw dict) from moment-file text."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as err:
        raise InputError(f"invalid JSON at line {err.lineno}, column {err.colno}: {err.msg}") from None
    if not isinstance(obj, dict):
        raise InputError("top level must be an object")
    n = _field(obj, "n")
    if not isinstance(n, int) or isinstance(n, bool) or n < 0:
        raise InputError(f"field 'n' must be a nonnegative integer, got {n!r}")
    curve = CurveParams(_rational(_field(obj, "a"), "field 'a'"), _rational(_field(obj, "b"), "field 'b'"))
    raw = _field(obj, "moments")
    if not isinstance(raw, dict):
        raise InputError("field 'moments' must be an object keyed by \"i,j\"")
    values = {}
    for key, val in raw.items():
        try:
            i, j = (int(s) for s in key.split(","))
        except ValueError:
            raise InputError(f"moments: bad key {key!r}, expected \"i,j\"") from None
        if i < 0 or j < 0 or i + j > 2 * n:
            raise InputError(f"moments[{key!r}]: index outside 0 <= i + j <= 2n = {2 * n}")
        values[(i, j)] = _rational(val, f"moments[{key!r}]")
    missing = [f"{i},{j}" for i, j in monomials(2 * n) if (i, j) not in values]
    if missing:
        raise InputError(f"moments: missing entries {', '.join(missing[:6])}{' ...' if len(missing) > 6 else ''}")
    return BivariateMoments(2 * n, values), curve, obj


def load_moments(path: str):
    with open(path) as fh:
        return parse_moments(fh.read())


def moments_to_json(beta: BivariateMoments, curve: CurveParams, symmetric: Optional[bool] = None, **extra) -> dict:
    out = {
        "n": beta.n,
        "a": format_rational(curve.a),
        "b": format_rational(curve.b),
    }
    if symmetric is not None:
        out["symmetric"] = symmetric
    out["moments"] = {f"{i},{j}": scalar_to_json(beta[(i, j)]) for i, j in monomials(beta.degree)}
    out.update(extra)
    return out


def dumps(obj) -> str:
    """Deterministic JSON text: insertion order, two-space indent, trailing newline."""
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


# --- generator ---------------------------------------------------------------


def _rand_rational(rng: random.Random, lo=-6, hi=6, den=4) -> Fraction:
    return Fraction(rng.randint(lo * den, hi * den), rng.randint(1, den))


def _rand_weight(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(1, 9), rng.randint(1, 4))


def generate(curve: CurveParams, atoms: int, seed: int, n: int = 3, symmetric: Optional[bool] = None) -> dict:
    """Deterministic exact moment data from seeded rational atoms on the curve.

    On ``y^2 = x^3`` the atoms are ``(t^2, t^3)`` for distinct rationals t.
    Otherwise (or when ``symmetric`` is set) they are pairs ``(x, +-sqrt z)``
    with ``z = x^3 + a x + b > 0`` and equal weights on each pair, so the
    odd-y moments cancel and every moment is rational; an odd count adds
    one atom at a rational root of the cubic when there is one.
    """
    if atoms < 1:
        raise ValueError("need at least one atom")
    rng = random.Random(seed)
    if symmetric is None:
        symmetric = not (curve.a == 0 and curve.b == 0)
    pts, wts = [], []
    if not symmetric:
        if curve.a != 0 or curve.b != 0:
            raise ValueError("non-symmetric generation is only available on y^2 = x^3")
        ts = set()
        while len(ts) < atoms:
            ts.add(_rand_rational(rng))
        for t in sorted(ts):
            pts.append((t * t, t**3))
            wts.append(_rand_weight(rng))
    else:
        from .symmetric import cubic_real_roots

        pairs, single = divmod(atoms, 2)
        if single:
            roots = cubic_real_roots(curve.a, curve.b)
            rational = [r for r in roots.roots if isinstance(r, Fraction)]
            if not rational:
                raise ValueError("an odd atom count needs a rational root of x^3 + a x + b")
            pts.append((rational[0], Fraction(0)))
            wts.append(_rand_weight(rng))
        xs = set()
        tries = 0
        while len(xs) < pairs:
            tries += 1
            if tries > 10000:
                raise ValueError("could not find enough points with x^3 + a x + b > 0")
            x = _rand_rational(rng)
            if curve.cubic(x) > 0:
                xs.add(x)
        for x in sorted(xs):
            y = QuadExt.sqrt(curve.cubic(x))
            y = y.u if y.is_rational else y
            w = _rand_weight(rng)
            pts += [(x, -y), (x, y)]
            wts += [w, w]
    beta = moments_from_atoms(pts, wts, 2 * n)
    gen = {
        "seed": seed,
        "atoms": [
            {"x": scalar_to_json(x), "y": scalar_to_json(y), "weight": scalar_to_json(w)}
            for (x, y), w in zip(pts, wts)
        ],
    }
    return moments_to_json(beta, curve, symmetric=symmetric, generator=gen)


def generator_atoms(obj: dict) -> tuple:
    """Atoms and weights recorded by :func:`generate`, back as exact values."""
    def scalar(v):
        return QuadExt.from_json(v) if isinstance(v, dict) else parse_rational(v)

    atoms = [(scalar(a["x"]), scalar(a["y"])) for a in obj["generator"]["atoms"]]
    weights = [scalar(a["weight"]) for a in obj["generator"]["atoms"]]
    return atoms, weights


# --- fixtures ----------------------------------------------------------------


def fixture_text(name: str, kind: str = "json") -> str:
    """Text of a bundled fixture: ``kind`` is "json" (moments) or "report" (expected report)."""
    fname = f"{name}.json" if kind == "json" else f"{name}.report.json"
    return resources.files("tmpkit").joinpath("data", fname).read_text()


def load_fixture(name: str):
    return parse_moments(fixture_text(name))
