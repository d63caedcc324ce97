"""Symbolic-numeric toolkit for Barnes-type Mellin-Barnes integrals."""
from .analysis import (ConvergenceReport, Strip, Verdict, analyze_convergence,
                       gamma_magnitude_asymptotic, strip)
from .lemmas import (Rule, SimplifyResult, ValidityCondition, derive_barnes2_via_barnes1,
                     match_additional, match_barnes1, match_barnes2, match_basic, simplify)
from .numerics import (QuadResult, beta, contour_quadrature, eval_closed, ln_gamma,
                       log_integrand, truncated_integral)
from .symexpr import (ClosedForm, CoefExpr, GammaFactor, KinFactor, LinExpr, MBIntegrand,
                      OnePlus, canonicalize, parse, render, shift_variable, substitute)

__version__ = "0.1.0"

__all__ = [
    "ConvergenceReport",
    "Strip",
    "Verdict",
    "analyze_convergence",
    "gamma_magnitude_asymptotic",
    "strip",
    "Rule",
    "SimplifyResult",
    "ValidityCondition",
    "derive_barnes2_via_barnes1",
    "match_additional",
    "match_barnes1",
    "match_barnes2",
    "match_basic",
    "simplify",
    "QuadResult",
    "beta",
    "contour_quadrature",
    "eval_closed",
    "ln_gamma",
    "log_integrand",
    "truncated_integral",
    "ClosedForm",
    "CoefExpr",
    "GammaFactor",
    "KinFactor",
    "LinExpr",
    "MBIntegrand",
    "OnePlus",
    "canonicalize",
    "parse",
    "render",
    "shift_variable",
    "substitute",
]
