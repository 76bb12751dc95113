"""Numerical toolkit for witnesses of equations involving the modular j-function."""

__version__ = "0.1.0"

from .errors import NumericalFailure, PreconditionError
from .modular import ModularEvaluator, eval_j, eval_j_derivative, invert_j
from .modgroup import UnimodularMatrix, RealMatrix, reduce_to_fundamental_domain, orbit_toward
from .witness import BivariatePolynomial, TargetFunction, WitnessProblem, find_witnesses, rouche_localize, zero_count
from .product import MoebiusVariety, SplitProfile, density_search, is_broad, is_hodge_generic
from .special import QuadraticForm, class_polynomial, is_quadratic, reduced_forms, special_scan

__all__ = [
    "NumericalFailure",
    "PreconditionError",
    "ModularEvaluator",
    "eval_j",
    "eval_j_derivative",
    "invert_j",
    "UnimodularMatrix",
    "RealMatrix",
    "reduce_to_fundamental_domain",
    "orbit_toward",
    "BivariatePolynomial",
    "TargetFunction",
    "WitnessProblem",
    "find_witnesses",
    "rouche_localize",
    "zero_count",
    "MoebiusVariety",
    "SplitProfile",
    "density_search",
    "is_broad",
    "is_hodge_generic",
    "QuadraticForm",
    "class_polynomial",
    "is_quadratic",
    "reduced_forms",
    "special_scan",
]
