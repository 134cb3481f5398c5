"""Exact-arithmetic solver for Schroeder's functional equation in C^n.

Given a polynomial self-map phi fixing 0 with triangular derivative and
eigenvalues in the punctured unit disk, this package decides whether
F(phi(z)) = phi'(0) F(z) has an analytic solution F with invertible
derivative, and constructs truncated power-series solutions of the
generalized equation F(phi(z)) = phi'(0)^k F(z).  All arithmetic is
over Gaussian rationals; nothing is floating point.
"""

from .compop import TruncatedCompOp, UnsupportedSpectrumError, truncation_degree
from .engine import (
    AnalysisReport,
    ComponentInfo,
    EigenvalueRecord,
    InvalidMapError,
    NoFullRankError,
    SchroederSolution,
    VerifyReport,
    analyze,
    detect_resonance,
    solve,
    solve_power,
    truncated_operator,
    verify,
)
from .linalg import ExactMatrix, JordanChain, SingularMatrixError
from .maps import PolyMap, compose, conjugate_map, map_compose
from .scalars import Scalar
from .series import Jet, enumerate_monomials, monomial_count

__all__ = [
    "AnalysisReport",
    "ComponentInfo",
    "EigenvalueRecord",
    "ExactMatrix",
    "InvalidMapError",
    "Jet",
    "JordanChain",
    "NoFullRankError",
    "PolyMap",
    "Scalar",
    "SchroederSolution",
    "SingularMatrixError",
    "TruncatedCompOp",
    "UnsupportedSpectrumError",
    "VerifyReport",
    "analyze",
    "compose",
    "conjugate_map",
    "detect_resonance",
    "enumerate_monomials",
    "map_compose",
    "monomial_count",
    "solve",
    "solve_power",
    "truncated_operator",
    "truncation_degree",
    "verify",
]

__version__ = "0.1.0"
