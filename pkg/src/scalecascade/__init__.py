"""Exact scale-cascade solutions of the scale-invariant ODE t dtau/dt = tau."""

__version__ = "0.1.0"

from .arith import JetQ, PolyQ, Ratio, as_ratio, jet_log, jet_mul, jet_recip, poly_eval, poly_mul
from .bigfloat import BigFloat, float_eval
from .cascade import (
    BranchSolution,
    Closure,
    Rule,
    ScaleSchedule,
    branch_jet,
    build_branch,
    eta_level,
    make_schedule,
    normalization_constant,
)
from .errors import CascadeError, DomainError, ResourceError

__all__ = [
    "BigFloat", "BranchSolution", "CascadeError", "Closure", "DomainError", "JetQ",
    "PolyQ", "Ratio", "ResourceError", "Rule", "ScaleSchedule", "as_ratio", "branch_jet",
    "build_branch", "eta_level", "float_eval", "jet_log", "jet_mul", "jet_recip",
    "make_schedule", "normalization_constant", "poly_eval", "poly_mul",
]
