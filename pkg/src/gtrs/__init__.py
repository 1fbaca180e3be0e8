"""Linear-time approximation algorithms for the generalized trust region subproblem.

Minimize ``q0(x)`` subject to ``q1(x) <= 0`` for two possibly nonconvex
quadratics ``q_i(x) = x^T A_i x + 2 b_i^T x + c_i`` with sparse ``A_i``.
"""

__version__ = "0.1.0"

from .errors import (
    CertificateError,
    ConvexConstraintRegime,
    DegenerateInputError,
    GTRSError,
    InputError,
    NotCertifiablyDefinite,
    NumericalError,
    ProbabilisticFailure,
    RoundingFailed,
    UnboundedBelow,
)
from .gamma_boundary import GammaBracket, approx_gamma_minus, approx_gamma_plus, gamma_bracket
from .hull import Regime, classify_pencil, hull_decompose, hull_membership
from .lanczos import EigEstimate, approx_eig
from .minimax import MinimaxProblem, solve_minimax
from .pipeline import SolveReport, SolverConfig, approx_convex, approx_gtrs, solve
from .quad_model import NormalizationScales, Pencil, Quadratic, SparseSymMatrix, normalize
from .regularity import RegularityCertificate, approx_xi, approx_zeta, diag_regularity

__all__ = [
    "CertificateError", "ConvexConstraintRegime", "DegenerateInputError", "GTRSError", "InputError",
    "NotCertifiablyDefinite", "NumericalError", "ProbabilisticFailure", "RoundingFailed", "UnboundedBelow",
    "GammaBracket", "approx_gamma_minus", "approx_gamma_plus", "gamma_bracket",
    "Regime", "classify_pencil", "hull_decompose", "hull_membership",
    "EigEstimate", "approx_eig", "MinimaxProblem", "solve_minimax",
    "SolveReport", "SolverConfig", "approx_convex", "approx_gtrs", "solve",
    "NormalizationScales", "Pencil", "Quadratic", "SparseSymMatrix", "normalize",
    "RegularityCertificate", "approx_xi", "approx_zeta", "diag_regularity",
]
