"""Exact solvers for truncated moment problems on cubic curves y^2 = x^3 + a x + b."""

from .exact import QuadExt, format_rational, parse_rational
from .extract import AtomicMeasure, extract_measure
from .flat_ext import build_flat_extension, compress, compute_R, flat_extensions, solve_R
from .formats import generate, load_fixture, load_moments, parse_moments
from .moments import BivariateMoments, CurveParams, build_moment_matrix, check_p_pure, moments_from_atoms
from .report import analyze
from .symmetric import cubic_real_roots, lift_measure, reduce, solve_symmetric
from .univariate import extend_singular, is_prg, solve_halfline, solve_union

__all__ = [
    "AtomicMeasure",
    "BivariateMoments",
    "CurveParams",
    "QuadExt",
    "analyze",
    "build_flat_extension",
    "build_moment_matrix",
    "check_p_pure",
    "compress",
    "compute_R",
    "cubic_real_roots",
    "extend_singular",
    "extract_measure",
    "flat_extensions",
    "format_rational",
    "generate",
    "is_prg",
    "lift_measure",
    "load_fixture",
    "load_moments",
    "moments_from_atoms",
    "parse_moments",
    "parse_rational",
    "reduce",
    "solve_R",
    "solve_halfline",
    "solve_symmetric",
    "solve_union",
]

__version__ = "0.1.0"
